#include "tavis/single_excitation.hpp"

#include "tavis/errors.hpp"
#include "tavis/kernels.hpp"

#include <Eigen/LU>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fftw3.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

namespace tavis {

// ---------------------------------------------------------------------------
// Frequency-domain response

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (!data) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* data;
};

// In-place transform; FFTW_ESTIMATE keeps the algorithm choice (and hence the bits) fixed.
void fft_in_place(FftwBuffer& buf, std::size_t n, int sign) {
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), buf.data, buf.data, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

// A jump J at t0 is carried by h(t) = J e^{-a (t - t0)} theta(t - t0), whose
// response has a closed form. Only the continuous remainder goes through the
// DFT, which removes the slowly decaying ringing a sampled step produces.
struct JumpCarrier {
    std::size_t node;
    cplx size;     // right - left
    double rate;   // a
};

std::vector<JumpCarrier> jump_carriers(const PulseShape& xi, const LinearModel& model) {
    std::vector<JumpCarrier> out;
    const auto n = model.order();
    for (const auto& j : xi.jumps) {
        const double after = xi.t_end() - xi.time(j.node);
        if (j.node + 20 >= xi.size()) continue;  // too close to the end to carry a decaying tail
        double rate = std::min(40.0 / after, 0.05 / xi.dt);
        // a must not coincide with an eigenvalue of -A.
        for (int tries = 0; tries < 8; ++tries) {
            Eigen::PartialPivLU<CMatrix> lu(model.a_matrix + rate * CMatrix::Identity(n, n));
            const auto d = lu.matrixLU().diagonal().cwiseAbs();
            if (d.minCoeff() > 1e-8 * std::max(1.0, d.maxCoeff())) break;
            rate *= 1.01;
        }
        out.push_back({j.node, j.right - j.left, rate});
    }
    return out;
}

cplx carrier_sample(const JumpCarrier& c, std::size_t i, double dt) {
    if (i < c.node) return 0.0;
    if (i == c.node) return 0.5 * c.size;
    return c.size * std::exp(-c.rate * dt * static_cast<double>(i - c.node));
}

// Adds the exact output of the carrier: h(t) + J C (A + aI)^{-1} (e^{A tau} - e^{-a tau}) B.
void add_carrier_response(const JumpCarrier& c, const LinearModel& model, double dt, std::vector<cplx>& eta) {
    const auto n = model.order();
    const Eigen::RowVectorXcd w =
        model.c_vector * (model.a_matrix + c.rate * CMatrix::Identity(n, n)).partialPivLu().inverse();
    const cplx wb = (w * model.b_vector)(0);
    const CMatrix step = (model.a_matrix * dt).exp();
    CVector v = model.b_vector;
    for (std::size_t i = c.node; i < eta.size(); ++i) {
        const double decay = std::exp(-c.rate * dt * static_cast<double>(i - c.node));
        eta[i] += carrier_sample(c, i, dt) + c.size * ((w * v)(0) - decay * wb);
        v = step * v;
    }
}

}  // namespace

PulseShape single_photon_response(const SystemParams& params, const PulseShape& xi, const ResponseOptions& options) {
    params.validate();
    if (xi.size() < 2) throw InvalidArgument("single_photon_response: input pulse needs at least two samples");
    if (options.padding_factor < 1) throw InvalidArgument("single_photon_response: padding_factor must be >= 1");
    if (params.kappa == 0.0) return xi;  // the field never touches the system

    LinearModel model = build_linear_model(params);
    if (!is_controllable(model).controllable) model = co_subsystem(structural_decompose(params), params);

    const std::size_t n = xi.size();
    const std::size_t m = n * static_cast<std::size_t>(options.padding_factor);
    const auto carriers = jump_carriers(xi, model);

    FftwBuffer buf(m);
    for (std::size_t i = 0; i < m; ++i) {
        cplx v = 0.0;
        if (i < n) {
            v = xi.values[i];
            for (const auto& c : carriers) v -= carrier_sample(c, i, xi.dt);
        }
        buf.data[i][0] = v.real();
        buf.data[i][1] = v.imag();
    }
    fft_in_place(buf, m, FFTW_FORWARD);

    // Bin j holds exp(+i w_j t) content, w_j = 2 pi j / (m dt) folded to (-pi/dt, pi/dt].
    std::vector<double> omegas(m);
    const double dw = 2.0 * std::numbers::pi / (static_cast<double>(m) * xi.dt);
    for (std::size_t j = 0; j < m; ++j) {
        const auto jj = static_cast<double>(j);
        omegas[j] = (j <= m / 2 ? jj : jj - static_cast<double>(m)) * dw;
    }
    const std::vector<cplx> g = kernels::transfer_sweep(model, omegas, options.threads);
    for (std::size_t j = 0; j < m; ++j) {
        const cplx y = g[j] * cplx(buf.data[j][0], buf.data[j][1]);
        buf.data[j][0] = y.real();
        buf.data[j][1] = y.imag();
    }
    fft_in_place(buf, m, FFTW_BACKWARD);

    PulseShape eta;
    eta.t_start = xi.t_start;
    eta.dt = xi.dt;
    eta.declared_norm = xi.declared_norm;
    eta.values.resize(n);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < n; ++i) eta.values[i] = cplx(buf.data[i][0], buf.data[i][1]) * scale;
    for (const auto& c : carriers) add_carrier_response(c, model, xi.dt, eta.values);
    // The feedthrough term of G is 1, so input jumps pass straight to the output.
    for (const auto& j : xi.jumps) {
        const cplx half = 0.5 * (j.left - j.right);
        eta.jumps.push_back({j.node, eta.values[j.node] + half, eta.values[j.node] - half});
    }
    return eta;
}

// ---------------------------------------------------------------------------
// Closed-form single-excitation dynamics

namespace {

struct Collective {
    int n;
    double omega_s;
    double coupling_sq;  // N * Gamma_bar^2
    cplx mu;             // kappa + 2i (omega_r - omega_s)
    cplx chi;
};

Collective collective(const SystemParams& params, bool negate_chi) {
    params.validate();
    if (params.n_atoms < 1) throw RegimeViolation("single-excitation dynamics need at least one atom");
    if (!has_equal_detunings(params))
        throw RegimeViolation("closed-form single-excitation dynamics need equal atomic detunings");
    Collective c;
    c.n = params.n_atoms;
    c.omega_s = params.omega.front();
    c.coupling_sq = params.n_atoms * params.gamma_bar() * params.gamma_bar();
    if (c.coupling_sq == 0.0) throw RegimeViolation("closed-form single-excitation dynamics need nonzero coupling");
    c.mu = params.kappa + 2.0 * kI * (params.omega_r - c.omega_s);
    c.chi = std::sqrt(c.mu * c.mu - 16.0 * c.coupling_sq);
    if (negate_chi) c.chi = -c.chi;
    return c;
}

// e^{-mu t/4} cosh(chi t/4) and e^{-mu t/4} sinh(chi t/4)/chi, stable for large t and for chi -> 0.
struct Hyperbolic {
    cplx cosh_part;
    cplx sinhc_part;
};

Hyperbolic hyperbolic(const Collective& c, double t) {
    const cplx z = 0.25 * c.chi * t;
    if (std::abs(z) < 1e-4) {
        const cplx e = std::exp(-0.25 * c.mu * t);
        const cplx z2 = z * z;
        return {e * (1.0 + z2 / 2.0 + z2 * z2 / 24.0), e * (0.25 * t) * (1.0 + z2 / 6.0 + z2 * z2 / 120.0)};
    }
    const cplx ep = std::exp(0.25 * (c.chi - c.mu) * t);
    const cplx em = std::exp(0.25 * (-c.chi - c.mu) * t);
    return {0.5 * (ep + em), (ep - em) / (2.0 * c.chi)};
}

// Bright-mode amplitude relative to its initial value (1 at t = 0, decays to 0).
cplx bright_factor(const Collective& c, const Hyperbolic& h) { return c.mu * h.sinhc_part + h.cosh_part; }

cplx rotating(const Collective& c, double t) { return std::polar(1.0, 0.5 * (c.n - 2) * c.omega_s * t); }

double phi_norm_integral(const SystemParams& params, const Collective& c, double t) {
    if (t <= 0.0) return 0.0;
    const double pref = 16.0 * params.kappa * c.coupling_sq;
    auto f = [&](double tau) { return pref * std::norm(hyperbolic(c, tau).sinhc_part); };
    // Split so the adaptive rule sees the decaying region at a sensible scale.
    double acc = 0.0;
    const double decay = std::max(params.kappa, 1e-12);
    const double chunk = 20.0 / decay;
    for (double a = 0.0; a < t; a += chunk) {
        const double b = std::min(t, a + chunk);
        acc += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
    }
    return acc;
}

}  // namespace

double SingleExcitationState::total_probability() const {
    double p = std::norm(c_cavity) + std::norm(c_field) * phi_norm;
    for (const auto& v : c) p += std::norm(v);
    return p;
}

cplx single_excitation_field(const SystemParams& params, int k, double tau, double t) {
    const Collective c = collective(params, false);
    if (k < 0 || k >= c.n) throw InvalidArgument("atom index out of range");
    if (tau < 0.0 || tau > t) return 0.0;
    const double gk = params.gamma[static_cast<std::size_t>(k)];
    const cplx c_field = gk / std::sqrt(c.coupling_sq) * rotating(c, t);
    const cplx phi = -4.0 * kI * std::sqrt(params.kappa * c.coupling_sq) * hyperbolic(c, tau).sinhc_part *
                     std::polar(1.0, c.omega_s * (t - tau));
    return c_field * phi;
}

SingleExcitationState analytic_single_excitation_state(const SystemParams& params, int k, double t,
                                                       const AnalyticOptions& options) {
    const Collective c = collective(params, options.negate_chi);
    if (k < 0 || k >= c.n) throw InvalidArgument("atom index out of range");
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("time must be finite and nonnegative");

    const Hyperbolic h = hyperbolic(c, t);
    const cplx rot = rotating(c, t);
    const cplx bright = bright_factor(c, h);
    const double gk = params.gamma[static_cast<std::size_t>(k)];
    const double s = c.coupling_sq;

    SingleExcitationState st;
    st.t = t;
    st.c.resize(static_cast<std::size_t>(c.n));
    for (int j = 0; j < c.n; ++j) {
        const double gj = params.gamma[static_cast<std::size_t>(j)];
        st.c[static_cast<std::size_t>(j)] =
            (j == k) ? rot * ((s - gk * gk) + gk * gk * bright) / s : -gj * gk * rot * (1.0 - bright) / s;
    }
    st.c_cavity = -4.0 * kI * gk * h.sinhc_part * rot;
    st.c_field = gk / std::sqrt(s) * rot;
    st.phi_norm = phi_norm_integral(params, c, t);

    if (options.phi_dt > 0.0) {
        const auto steps = t > 0.0 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t / options.phi_dt)))
                                   : std::size_t{0};
        st.phi.t_start = 0.0;
        st.phi.dt = t > 0.0 ? t / static_cast<double>(steps) : options.phi_dt;
        st.phi.values.resize(steps + 1);
        const cplx pref = -4.0 * kI * std::sqrt(params.kappa * s);
        for (std::size_t i = 0; i <= steps; ++i) {
            const double tau = st.phi.time(i);
            st.phi.values[i] = pref * hyperbolic(c, tau).sinhc_part * std::polar(1.0, c.omega_s * (t - tau));
        }
        st.phi.declared_norm = st.phi_norm;
    }
    return st;
}

SingleExcitationState steady_single_excitation_state(const SystemParams& params, int k) {
    const Collective c = collective(params, false);
    if (k < 0 || k >= c.n) throw InvalidArgument("atom index out of range");
    if (!(params.kappa > 0.0)) throw RegimeViolation("a steady state needs kappa > 0");
    const double s = c.coupling_sq;
    const double gk = params.gamma[static_cast<std::size_t>(k)];
    SingleExcitationState st;
    st.t = std::numeric_limits<double>::infinity();
    st.moduli_only = std::abs(c.omega_s) > kDegeneracyTolerance;
    st.c.resize(static_cast<std::size_t>(c.n));
    for (int j = 0; j < c.n; ++j) {
        const double gj = params.gamma[static_cast<std::size_t>(j)];
        const double v = (j == k) ? (s - gk * gk) / s : -gj * gk / s;
        st.c[static_cast<std::size_t>(j)] = st.moduli_only ? std::abs(v) : v;
    }
    st.c_cavity = 0.0;
    st.c_field = st.moduli_only ? std::abs(gk) / std::sqrt(s) : gk / std::sqrt(s);
    st.phi_norm = 1.0;
    return st;
}

// ---------------------------------------------------------------------------

SuperpositionState superposition_evolution(cplx alpha, cplx beta, const SystemParams& params, double t,
                                           double field_dt) {
    const double w = std::norm(alpha) + std::norm(beta);
    if (std::abs(w - 1.0) > 1e-9)
        throw NormViolation("|alpha|^2 + |beta|^2 = " + std::to_string(w) + ", expected 1");
    const Collective c = collective(params, false);
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("time must be finite and nonnegative");
    const int n = c.n;

    std::vector<cplx> weight(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k)
        weight[static_cast<std::size_t>(k - 1)] =
            (alpha + beta * std::polar(1.0, -2.0 * std::numbers::pi * k / n)) / std::sqrt(static_cast<double>(n));

    SuperpositionState out;
    out.t = t;
    out.atoms.assign(static_cast<std::size_t>(n), 0.0);
    cplx field_weight = 0.0;
    double phi_norm = 0.0;
    AnalyticOptions opts;
    opts.phi_dt = field_dt;
    PulseShape phi;
    for (int k = 0; k < n; ++k) {
        const auto wk = weight[static_cast<std::size_t>(k)];
        const auto st = analytic_single_excitation_state(params, k, t, k == 0 ? opts : AnalyticOptions{});
        for (int j = 0; j < n; ++j) out.atoms[static_cast<std::size_t>(j)] += wk * st.c[static_cast<std::size_t>(j)];
        out.cavity += wk * st.c_cavity;
        field_weight += wk * st.c_field;
        if (k == 0) {
            phi_norm = st.phi_norm;
            phi = st.phi;
        }
    }
    out.field_norm = std::norm(field_weight) * phi_norm;
    if (field_dt > 0.0) {
        out.field = phi;
        for (auto& v : out.field.values) v *= field_weight;
        out.field.declared_norm = out.field_norm;
    }
    return out;
}

}  // namespace tavis
