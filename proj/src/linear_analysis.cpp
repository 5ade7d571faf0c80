#include "tavis/linear_analysis.hpp"

#include "tavis/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace tavis {

double LinearModel::passivity_residual() const {
    const CMatrix c_adj = c_vector.adjoint();
    const CMatrix top_left = a_matrix + a_matrix.adjoint() + c_adj * c_vector;
    const CMatrix top_right = b_vector + c_adj;
    return std::max(top_left.cwiseAbs().maxCoeff(), top_right.cwiseAbs().maxCoeff());
}

LinearModel build_linear_model(const SystemParams& params) {
    params.validate();
    const int N = params.n_atoms;
    LinearModel m;
    m.a_matrix = CMatrix::Zero(N + 1, N + 1);
    for (int j = 0; j < N; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        m.a_matrix(j, j) = -kI * params.omega[ju];
        m.a_matrix(j, N) = -kI * params.gamma[ju];
        m.a_matrix(N, j) = -kI * params.gamma[ju];
    }
    m.a_matrix(N, N) = -kI * params.omega_r - 0.5 * params.kappa;
    m.b_vector = CVector::Zero(N + 1);
    m.b_vector(N) = -std::sqrt(params.kappa);
    m.c_vector = -m.b_vector.transpose();
    return m;
}

TransferEval transfer_function(const LinearModel& model, cplx s) {
    const auto n = model.order();
    const CMatrix resolvent = s * CMatrix::Identity(n, n) - model.a_matrix;
    Eigen::JacobiSVD<CMatrix> svd(resolvent, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(n - 1);
    if (!(smin > 1e-13 * std::max(1.0, smax)))
        throw SingularResolvent("sI - A is singular at s = (" + std::to_string(s.real()) + ", " +
                                std::to_string(s.imag()) + ")");
    const CVector x = svd.solve(model.b_vector);
    const cplx g = 1.0 + (model.c_vector * x)(0);
    return {s, g, g - 1.0};
}

cplx transfer_function_closed_form(const SystemParams& params, cplx s) {
    params.validate();
    const int N = params.n_atoms;
    const double half_kappa = 0.5 * params.kappa;
    const cplx cav = s + kI * params.omega_r;
    if (N == 0) return (cav - half_kappa) / (cav + half_kappa);

    if (has_equal_detunings(params)) {
        const cplx atom = s + kI * params.omega.front();
        const double coupling_sq = N * params.gamma_bar() * params.gamma_bar();
        return (coupling_sq + atom * (cav - half_kappa)) / (coupling_sq + atom * (cav + half_kappa));
    }

    cplx num = 0.0;
    cplx den = 0.0;
    const double inv_n = 1.0 / N;
    for (int k = 0; k < N; ++k) {
        cplx prod = 1.0;
        for (int j = 0; j < N; ++j)
            if (j != k) prod *= s + kI * params.omega[static_cast<std::size_t>(j)];
        const double g2 = params.gamma[static_cast<std::size_t>(k)] * params.gamma[static_cast<std::size_t>(k)];
        const cplx atom = s + kI * params.omega[static_cast<std::size_t>(k)];
        num += (g2 + inv_n * atom * (cav - half_kappa)) * prod;
        den += (g2 + inv_n * atom * (cav + half_kappa)) * prod;
    }
    return num / den;
}

double t_magnitude_squared(const SystemParams& params, double omega) {
    params.validate();
    if (!has_equal_detunings(params))
        throw RegimeViolation("t_magnitude_squared requires equal atomic detunings");
    if (std::abs(params.omega_r) > kDegeneracyTolerance ||
        (params.n_atoms > 0 && std::abs(params.omega.front()) > kDegeneracyTolerance))
        throw RegimeViolation("t_magnitude_squared requires omega_r = omega_s = 0");
    const double k2 = params.kappa * params.kappa;
    const double split = params.n_atoms * params.gamma_bar() * params.gamma_bar();
    if (split == 0.0) return k2 / (omega * omega + 0.25 * k2);
    const double w2 = omega * omega;
    const double detune = split - w2;
    return k2 * w2 / (detune * detune + 0.25 * k2 * w2);
}

// ---------------------------------------------------------------------------

namespace {

double spectral_norm(const CMatrix& a) {
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues()(0);
}

struct PbhOutcome {
    bool full_rank = true;
    CVector null_vector;
    cplx eigenvalue;
};

// Checks rank of [A - lambda I; row] for every eigenvalue lambda of A.
PbhOutcome pbh(const CMatrix& a, const Eigen::RowVectorXcd& row) {
    const auto n = a.rows();
    PbhOutcome out;
    if (n == 0) return out;
    const double tol = kPbhRelativeTolerance * std::max(spectral_norm(a), 1e-300);
    Eigen::ComplexEigenSolver<CMatrix> es(a, false);
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx lambda = es.eigenvalues()(i);
        CMatrix stacked(n + 1, n);
        stacked.topRows(n) = a - lambda * CMatrix::Identity(n, n);
        stacked.row(n) = row;
        Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeFullV);
        if (svd.singularValues()(n - 1) < tol) {
            out.full_rank = false;
            out.null_vector = svd.matrixV().col(n - 1);
            out.eigenvalue = lambda;
            return out;
        }
    }
    return out;
}

}  // namespace

ControllabilityResult is_controllable(const LinearModel& model) {
    const PbhOutcome o = pbh(model.a_matrix, model.b_vector.adjoint());
    ControllabilityResult r;
    r.controllable = o.full_rank;
    if (!o.full_rank) {
        // Fix the phase so the largest entry is real and positive.
        CVector w = o.null_vector;
        Eigen::Index imax = 0;
        w.cwiseAbs().maxCoeff(&imax);
        w *= std::conj(w(imax)) / std::abs(w(imax));
        r.witness = w;
        r.eigenvalue = o.eigenvalue;
    }
    return r;
}

bool is_observable(const LinearModel& model) { return pbh(model.a_matrix, model.c_vector).full_rank; }

bool is_hurwitz(const LinearModel& model) {
    const auto n = model.order();
    if (n == 0) return true;
    const double tol = kPbhRelativeTolerance * std::max(spectral_norm(model.a_matrix), 1e-300);
    Eigen::ComplexEigenSolver<CMatrix> es(model.a_matrix, false);
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(es.eigenvalues()(i).real() < -tol)) return false;
    return true;
}

// ---------------------------------------------------------------------------

namespace {

void make_first_nonzero_positive(Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-14) {
            if (v(i) < 0) v = -v;
            return;
        }
    }
}

}  // namespace

Decomposition structural_decompose(const SystemParams& params) {
    params.validate();
    const int N = params.n_atoms;
    Decomposition d;
    d.transform = Eigen::MatrixXd::Zero(N + 1, N + 1);

    std::vector<int> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return params.omega[static_cast<std::size_t>(a)] < params.omega[static_cast<std::size_t>(b)];
    });

    double max_abs_gamma = 0.0;
    for (double g : params.gamma) max_abs_gamma = std::max(max_abs_gamma, std::abs(g));
    const double zero_tol = 1e-14 * std::max(max_abs_gamma, 1.0);

    int column = 0;
    for (std::size_t pos = 0; pos < order.size();) {
        FrequencyGroup grp;
        grp.frequency = params.omega[static_cast<std::size_t>(order[pos])];
        while (pos < order.size() &&
               std::abs(params.omega[static_cast<std::size_t>(order[pos])] - grp.frequency) <= kDegeneracyTolerance)
            grp.atoms.push_back(order[pos++]);
        std::sort(grp.atoms.begin(), grp.atoms.end());
        grp.first_column = column;

        std::vector<int> coupled;
        grp.effective_coupling = 0.0;
        for (int a : grp.atoms) {
            const double g = params.gamma[static_cast<std::size_t>(a)];
            grp.effective_coupling += g * g;
            if (std::abs(g) > zero_tol) {
                coupled.push_back(a);
            } else {
                // Uncoupled atom: already isolated, identity column.
                d.transform(a, column) = 1.0;
                d.dfs_columns.push_back(column++);
                d.zero_coupling_in_group = true;
            }
        }

        // Dark combinations over the coupled subset:
        // [g_{m+1} g_1, ..., g_{m+1} g_m, -(g_1^2 + ... + g_m^2), 0, ...].
        double partial = 0.0;
        for (std::size_t m = 1; m < coupled.size(); ++m) {
            const double g_next = params.gamma[static_cast<std::size_t>(coupled[m])];
            partial += std::pow(params.gamma[static_cast<std::size_t>(coupled[m - 1])], 2);
            Eigen::VectorXd v = Eigen::VectorXd::Zero(N + 1);
            for (std::size_t i = 0; i < m; ++i)
                v(coupled[i]) = g_next * params.gamma[static_cast<std::size_t>(coupled[i])];
            v(coupled[m]) = -partial;
            v.normalize();
            make_first_nonzero_positive(v);
            d.transform.col(column) = v;
            d.dfs_columns.push_back(column++);
        }

        grp.has_bright_mode = !coupled.empty();
        grp.dfs_dimension = static_cast<int>(grp.atoms.size()) - (grp.has_bright_mode ? 1 : 0);
        if (grp.has_bright_mode) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(N + 1);
            for (int a : coupled) v(a) = params.gamma[static_cast<std::size_t>(a)];
            v.normalize();
            d.transform.col(column) = v;
            d.co_columns.push_back(column++);
        }
        d.effective_couplings.push_back(grp.effective_coupling);
        d.groups.push_back(std::move(grp));
    }
    d.transform(N, N) = 1.0;
    d.co_columns.push_back(N);

    const LinearModel model = build_linear_model(params);
    const CMatrix t = d.transform.cast<cplx>();
    d.a_hat = t.transpose() * model.a_matrix * t;
    return d;
}

LinearModel co_subsystem(const Decomposition& decomp, const SystemParams& params) {
    const auto m = static_cast<Eigen::Index>(decomp.co_columns.size());
    LinearModel r;
    r.a_matrix = CMatrix(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            r.a_matrix(i, j) = decomp.a_hat(decomp.co_columns[static_cast<std::size_t>(i)],
                                            decomp.co_columns[static_cast<std::size_t>(j)]);
    r.b_vector = CVector::Zero(m);
    r.b_vector(m - 1) = -std::sqrt(params.kappa);
    r.c_vector = -r.b_vector.transpose();
    return r;
}

// ---------------------------------------------------------------------------

namespace {

cplx collective_phase(int k, int n_atoms) {
    const double phi = 2.0 * std::numbers::pi * k / n_atoms;
    return std::polar(1.0, -phi);
}

}  // namespace

CVector bright_state_vector(int n_atoms) {
    CVector v = CVector::Zero(n_atoms + 1);
    for (int k = 0; k < n_atoms; ++k) v(k) = 1.0 / std::sqrt(static_cast<double>(n_atoms));
    return v;
}

CVector dark_state_vector(int n_atoms) {
    CVector v = CVector::Zero(n_atoms + 1);
    for (int k = 1; k <= n_atoms; ++k)
        v(k - 1) = collective_phase(k, n_atoms) / std::sqrt(static_cast<double>(n_atoms));
    return v;
}

DarkBrightCoordinates dark_bright_coordinates(const SystemParams& params) {
    params.validate();
    const int N = params.n_atoms;
    if (N < 2) throw RegimeViolation("dark/bright coordinates need at least two atoms");
    if (!has_equal_detunings(params)) throw RegimeViolation("dark/bright coordinates need equal detunings");
    const double g0 = params.gamma.front();
    if (g0 == 0.0) throw RegimeViolation("dark/bright coordinates need nonzero coupling");
    for (double g : params.gamma)
        if (std::abs(g - g0) > kDegeneracyTolerance * std::max(1.0, std::abs(g0)))
            throw RegimeViolation("dark/bright coordinates need identical couplings");

    const Decomposition d = structural_decompose(params);
    DarkBrightCoordinates out;
    out.bright = d.transform.cast<cplx>().transpose() * bright_state_vector(N);

    out.dark = CVector::Zero(N + 1);
    for (int j = 1; j <= N - 2; ++j) {
        cplx tail = 0.0;
        for (int k = j + 2; k <= N; ++k) tail += collective_phase(k, N);
        out.dark(j - 1) = -std::sqrt((j + 1.0) / (static_cast<double>(j) * N)) *
                          (collective_phase(j + 1, N) + tail / (j + 1.0));
    }
    out.dark(N - 2) = -collective_phase(N, N) / std::sqrt(N - 1.0);
    return out;
}

}  // namespace tavis
