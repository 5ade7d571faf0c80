#include "oracles.hpp"

#include "tavis/errors.hpp"
#include "tavis/kernels.hpp"
#include "tavis/single_excitation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace tavis;

namespace {

SystemParams fig2(int n, std::vector<double> omega = {}) {
    auto p = SystemParams::uniform(n, 0.0, 0.0, 1.0, 1.0);
    if (!omega.empty()) p.omega = std::move(omega);
    return p;
}

double last_local_max_above(const PulseShape& p, double threshold) {
    double last = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        const double a = std::norm(p.values[i - 1]), b = std::norm(p.values[i]), c = std::norm(p.values[i + 1]);
        if (p.time(i) > 0.0 && b > a && b >= c && b > threshold) last = p.time(i);
    }
    return last;
}

}  // namespace

// ---------------------------------------------------------------------------
// Pulses

TEST(Pulse, RisingExponentialValues) {
    EXPECT_NEAR(std::abs(rising_exponential_at(1.0, -1e-14)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(rising_exponential_at(1.0, -2.0 * std::log(2.0))), 0.5, 1e-15);
    EXPECT_EQ(rising_exponential_at(1.0, 0.3), cplx(0.0));
}

TEST(Pulse, RisingExponentialNorm) {
    const auto p = rising_exponential(1.0, TimeGrid::spanning(-20.0, 0.0, 1e-3));
    EXPECT_NEAR(p.norm(), 1.0, 1e-4);
    EXPECT_NEAR(p.riemann_norm(), 1.0, 1e-3);
    ASSERT_EQ(p.jumps.size(), 1u);
    EXPECT_EQ(p.jumps[0].node, p.size() - 1);
}

TEST(Pulse, GridTooShort) {
    EXPECT_THROW(rising_exponential(1.0, TimeGrid::spanning(-5.0, 0.0, 1e-2)), GridTooShort);
    EXPECT_THROW(gaussian_pulse(3.0, 3.0, TimeGrid::spanning(0.0, 3.5, 1e-2)), GridTooShort);
    try {
        rising_exponential(1.0, TimeGrid::spanning(-5.0, 0.0, 1e-2));
    } catch (const Error& e) {
        EXPECT_EQ(e.error_class(), ErrorClass::Config);
    }
}

TEST(Pulse, LorentzianWidthEqualsGamma) {
    const double gamma = 1.3;
    const auto p = rising_exponential(gamma, TimeGrid::spanning(-40.0, 5.0, 2e-3));
    auto spectrum = [&](double w) {
        // Trapezoid-consistent DFT: the jump node carries its midpoint sample.
        cplx acc = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) acc += p.values[i] * std::polar(1.0, -w * p.time(i));
        return std::norm(acc * p.dt);
    };
    const double peak = spectrum(0.0);
    auto half_crossing = [&](double lo, double hi) {
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (spectrum(mid) > 0.5 * peak ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double fwhm = half_crossing(0.0, 3.0 * gamma) - half_crossing(0.0, -3.0 * gamma);
    EXPECT_NEAR(fwhm, gamma, 1e-3 * gamma);
}

TEST(Pulse, GaussianShape) {
    const auto p = gaussian_pulse(3.0, 3.0, TimeGrid::spanning(1.0, 5.0, 1e-3));
    EXPECT_NEAR(std::abs(gaussian_at(3.0, 3.0, 3.0)), std::pow(9.0 / (2.0 * std::numbers::pi), 0.25), 1e-15);
    const std::size_t peak = 2000;
    EXPECT_NEAR(p.time(peak), 3.0, 1e-12);
    // Offsets that are exact in binary, so t_p +- s are computed without rounding.
    for (int i = 1; i < 2048; i += 37) EXPECT_EQ(gaussian_at(3.0, 3.0, 3.0 + i / 1024.0), gaussian_at(3.0, 3.0, 3.0 - i / 1024.0));
    EXPECT_NEAR(p.norm(), 1.0, 1e-6);
}

TEST(Pulse, InterpolationHonoursJump) {
    const auto p = rising_exponential(1.0, TimeGrid::spanning(-20.0, 2.0, 1e-2));
    EXPECT_NEAR(std::abs(p.at(-0.005)), std::exp(-0.0025), 1e-4);
    EXPECT_EQ(p.at(0.005), cplx(0.0));
    EXPECT_NEAR(std::abs(p.at(0.0)), 0.5, 1e-12);
    EXPECT_EQ(p.at(-30.0), cplx(0.0));
    EXPECT_EQ(p.at(3.0), cplx(0.0));
}

// ---------------------------------------------------------------------------
// Frequency-domain response

TEST(Response, EmptyCavityMatchesConvolution) {
    const double gamma = 1.0, kappa = 1.0;
    const auto grid = TimeGrid::spanning(-40.0, 20.0, 1e-3);
    const auto xi = rising_exponential(gamma, grid);
    SystemParams p;
    p.kappa = kappa;
    const auto eta = single_photon_response(p, xi);
    // Convolution of the truncated pulse with delta(t) - kappa e^{-kappa t/2} theta(t), in closed form.
    std::vector<cplx> exact(grid.n_points);
    const double rate = 0.5 * (gamma + kappa);
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        const double t = grid.time(i);
        const double hi = std::min(t, 0.0);
        const double integral = (std::exp(rate * hi) - std::exp(rate * grid.t_start)) / rate;
        exact[i] = xi.values[i] - kappa * std::sqrt(gamma) * std::exp(-0.5 * kappa * t) * integral;
    }
    EXPECT_LT(oracle::l2_distance(eta.values, exact, grid.dt), 1e-6);
    EXPECT_NEAR(eta.norm(), 1.0, 1e-4);
}

TEST(Response, MatchesTimeDomainOracle) {
    const auto grid = TimeGrid::spanning(-40.0, 20.0, 1e-3);
    const auto xi = rising_exponential(1.0, grid);
    for (int n : {1, 3}) {
        const auto p = fig2(n);
        const auto eta = single_photon_response(p, xi);
        const auto ref = oracle::linear_response_ode(build_linear_model(p), oracle::sided_rising_exponential(1.0), grid, 2);
        EXPECT_LT(oracle::l2_distance(eta.values, ref, grid.dt), 1e-6) << "N = " << n;
        EXPECT_NEAR(eta.norm(), 1.0, 1e-4);
    }
}

TEST(Response, NonResonantMatchesOracle) {
    const auto grid = TimeGrid::spanning(-40.0, 40.0, 1e-3);
    const auto xi = rising_exponential(1.0, grid);
    const auto p = fig2(3, {1.0, -1.0, 0.0});
    const auto eta = single_photon_response(p, xi);
    const auto ref = oracle::linear_response_ode(build_linear_model(p), oracle::sided_rising_exponential(1.0), grid, 2);
    EXPECT_LT(oracle::l2_distance(eta.values, ref, grid.dt), 1e-6);
}

TEST(Response, LargeEnsemblesLeavePulseIntact) {
    const auto xi = rising_exponential(1.0, TimeGrid::spanning(-40.0, 20.0, 1e-3));
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {3, 10, 50}) {
        const auto eta = single_photon_response(fig2(n), xi);
        const double d = oracle::l2_distance(eta.values, xi.values, xi.dt);
        EXPECT_LT(d, prev) << "N = " << n;
        prev = d;
    }
}

TEST(Response, NonResonantOscillationPersists) {
    const auto xi = rising_exponential(1.0, TimeGrid::spanning(-40.0, 40.0, 1e-3));
    const auto res = single_photon_response(fig2(3), xi);
    const auto non = single_photon_response(fig2(3, {1.0, -1.0, 0.0}), xi);
    EXPECT_GT(last_local_max_above(non, 1e-3), last_local_max_above(res, 1e-3));
}

TEST(Response, ThreadedSweepIsBitwiseIdentical) {
    const auto xi = rising_exponential(1.0, TimeGrid::spanning(-20.0, 10.0, 1e-2));
    const auto a = single_photon_response(fig2(3, {1.0, -1.0, 0.0}), xi, {4, 1});
    const auto b = single_photon_response(fig2(3, {1.0, -1.0, 0.0}), xi, {4, 3});
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.values[i], b.values[i]);
}

TEST(Response, SweepKernelsAgree) {
    const auto m = build_linear_model(fig2(3, {0.3, -0.4, 1.1}));
    std::vector<double> w(1001);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = -5.0 + 0.01 * static_cast<double>(i);
    const auto s = kernels::transfer_sweep_serial(m, w);
    const auto q = kernels::transfer_sweep_parallel(m, w, 4);
    for (std::size_t i = 0; i < w.size(); ++i) {
        EXPECT_EQ(s[i], q[i]);
        EXPECT_LT(std::abs(s[i] - transfer_function(m, cplx(0, w[i])).g_value), 1e-12);
    }
    const auto singular = build_linear_model(fig2(2, {0.5, 0.5}));
    const std::vector<double> pole = {-0.5};
    EXPECT_THROW(kernels::transfer_sweep_serial(singular, pole), SingularResolvent);
    EXPECT_THROW(kernels::transfer_sweep_parallel(singular, pole, 2), SingularResolvent);
}

// ---------------------------------------------------------------------------
// Closed-form single-excitation state

namespace {

struct OracleState {
    std::vector<cplx> atoms;
    cplx cavity;
    double field_probability;
};

OracleState expm_state(const SystemParams& p, int k, double t) {
    TruncatedBasis basis(p.n_atoms, 1);
    const CMatrix h = build_effective_hamiltonian(p, basis).matrix();
    std::string ket(static_cast<std::size_t>(p.n_atoms), 'g');
    ket[static_cast<std::size_t>(k)] = 'e';
    const CVector psi = oracle::evolve_expm(h, basis_ket(basis, ket + "0"), t);
    OracleState s;
    for (int j = 0; j < p.n_atoms; ++j) {
        std::string kj(static_cast<std::size_t>(p.n_atoms), 'g');
        kj[static_cast<std::size_t>(j)] = 'e';
        s.atoms.push_back(psi(static_cast<Eigen::Index>(basis.index_of(kj + "0"))));
    }
    s.cavity = psi(static_cast<Eigen::Index>(basis.index_of(std::string(static_cast<std::size_t>(p.n_atoms), 'g') + "1")));
    s.field_probability = 1.0 - psi.squaredNorm();
    return s;
}

}  // namespace

TEST(AnalyticState, InitialCondition) {
    const auto p = SystemParams::uniform(3, 0.4, -0.2, 1.0, 1.0);
    const auto s = analytic_single_excitation_state(p, 1, 0.0, {0.1, false});
    EXPECT_LT(std::abs(s.c[1] - cplx(1.0)), 1e-15);
    EXPECT_EQ(std::abs(s.c[0]), 0.0);
    EXPECT_EQ(std::abs(s.c[2]), 0.0);
    EXPECT_EQ(std::abs(s.c_cavity), 0.0);
    EXPECT_EQ(s.phi_norm, 0.0);
    for (const auto& v : s.phi.values) EXPECT_EQ(std::abs(v), 0.0);
}

TEST(AnalyticState, SteadyValues) {
    const auto s = steady_single_excitation_state(SystemParams::uniform(3, 0.0, 0.0, 1.0, 1.0), 0);
    EXPECT_NEAR(std::norm(s.c[0]), 4.0 / 9.0, 1e-15);
    EXPECT_NEAR(std::norm(s.c[1]), 1.0 / 9.0, 1e-15);
    EXPECT_NEAR(std::norm(s.c[2]), 1.0 / 9.0, 1e-15);
    EXPECT_NEAR(std::norm(s.c_field), 1.0 / 3.0, 1e-15);
    EXPECT_FALSE(s.moduli_only);
    EXPECT_NEAR(s.total_probability(), 1.0, 1e-14);
    // Long-time closed form approaches the steady values.
    const auto late = analytic_single_excitation_state(SystemParams::uniform(3, 0.0, 0.0, 1.0, 1.0), 0, 80.0);
    for (int j = 0; j < 3; ++j) EXPECT_LT(std::abs(late.c[static_cast<std::size_t>(j)] - s.c[static_cast<std::size_t>(j)]), 1e-8);
    EXPECT_NEAR(late.phi_norm, 1.0, 1e-8);
}

TEST(AnalyticState, MatchesSchrodingerOracle) {
    SystemParams p;
    p.n_atoms = 3;
    p.omega = {0.3, 0.3, 0.3};
    p.gamma = {1.0, -0.6, 1.4};
    p.omega_r = -0.5;
    p.kappa = 1.2;
    for (int k = 0; k < 3; ++k) {
        double worst = 0.0;
        for (int i = 0; i < 500; ++i) {
            const double t = 0.04 * i;
            const auto s = analytic_single_excitation_state(p, k, t);
            const auto o = expm_state(p, k, t);
            for (int j = 0; j < 3; ++j)
                worst = std::max(worst, std::abs(s.c[static_cast<std::size_t>(j)] - o.atoms[static_cast<std::size_t>(j)]));
            worst = std::max(worst, std::abs(s.c_cavity - o.cavity));
            worst = std::max(worst, std::abs(std::norm(s.c_field) * s.phi_norm - o.field_probability));
            ASSERT_NEAR(s.total_probability(), 1.0, 1e-6);
        }
        EXPECT_LT(worst, 1e-6) << "k = " << k;
    }
}

TEST(AnalyticState, FieldEqualsCavityLeakage) {
    // |c_field phi(tau)| = sqrt(kappa) |c_cavity(tau)| for an emission at tau.
    const auto p = SystemParams::uniform(2, 0.2, 0.1, 0.9, 1.5);
    for (double tau : {0.3, 1.0, 2.5, 7.0}) {
        const auto at_tau = analytic_single_excitation_state(p, 0, tau);
        EXPECT_NEAR(std::abs(single_excitation_field(p, 0, tau, 9.0)), std::sqrt(p.kappa) * std::abs(at_tau.c_cavity),
                    1e-12);
    }
}

TEST(AnalyticState, CriticalDampingIsFinite) {
    // kappa^2 = 16 N Gamma_bar^2 makes chi vanish.
    const auto p = SystemParams::uniform(1, 0.0, 0.0, 0.25, 1.0);
    for (double t : {0.0, 0.5, 3.0, 20.0}) {
        const auto s = analytic_single_excitation_state(p, 0, t);
        const auto o = expm_state(p, 0, t);
        EXPECT_LT(std::abs(s.c[0] - o.atoms[0]), 1e-9);
        EXPECT_LT(std::abs(s.c_cavity - o.cavity), 1e-9);
    }
}

TEST(AnalyticState, ChiBranchCancels) {
    const auto p = SystemParams::uniform(3, 0.7, -0.4, 1.1, 0.8);
    for (double t : {0.1, 1.0, 4.0, 15.0}) {
        const auto a = analytic_single_excitation_state(p, 2, t, {0.05, false});
        const auto b = analytic_single_excitation_state(p, 2, t, {0.05, true});
        for (int j = 0; j < 3; ++j) EXPECT_LT(std::abs(a.c[static_cast<std::size_t>(j)] - b.c[static_cast<std::size_t>(j)]), 1e-13);
        EXPECT_LT(std::abs(a.c_cavity - b.c_cavity), 1e-13);
        for (std::size_t i = 0; i < a.phi.size(); ++i) EXPECT_LT(std::abs(a.phi.values[i] - b.phi.values[i]), 1e-12);
    }
}

TEST(AnalyticState, SteadyIndependentOfCavityDetuning) {
    std::vector<double> ref;
    for (double wr : {0.0, 1.0, 5.0}) {
        const auto p = SystemParams::uniform(3, 0.0, wr, 1.0, 1.0);
        const auto s = steady_single_excitation_state(p, 0);
        const auto late = analytic_single_excitation_state(p, 0, 2000.0);
        for (int j = 0; j < 3; ++j) {
            EXPECT_NEAR(std::abs(late.c[static_cast<std::size_t>(j)]), std::abs(s.c[static_cast<std::size_t>(j)]), 1e-8);
            if (ref.size() < 3) ref.push_back(std::abs(late.c[static_cast<std::size_t>(j)]));
            else EXPECT_NEAR(std::abs(late.c[static_cast<std::size_t>(j)]), ref[static_cast<std::size_t>(j)], 1e-8);
        }
    }
}

TEST(AnalyticState, SteadyModuliForDetunedAtoms) {
    const auto s = steady_single_excitation_state(SystemParams::uniform(3, 0.5, 0.0, 1.0, 1.0), 0);
    EXPECT_TRUE(s.moduli_only);
    EXPECT_NEAR(std::abs(s.c[0]), 2.0 / 3.0, 1e-15);
}

TEST(AnalyticState, CavityEmpties) {
    const auto s = analytic_single_excitation_state(SystemParams::uniform(3, 0.0, 0.0, 1.0, 1.0), 0, 50.0);
    EXPECT_LT(std::abs(s.c_cavity), 1e-4);
}

TEST(AnalyticState, LargeEnsembleStaysExcited) {
    double prev = 0.0;
    for (int n = 1; n <= 20; ++n) {
        const auto s = steady_single_excitation_state(SystemParams::uniform(n, 0.0, 0.0, 1.0, 1.0), 0);
        const double pk = std::norm(s.c[0]);
        EXPECT_GT(pk, prev - 1e-15) << "N = " << n;
        EXPECT_NEAR(std::norm(s.c_field), 1.0 / n, 1e-14);
        prev = pk;
    }
    EXPECT_GT(prev, 0.9);
}

TEST(AnalyticState, RegimeViolation) {
    SystemParams p = SystemParams::uniform(2, 0.0, 0.0, 1.0, 1.0);
    p.omega = {0.0, 0.1};
    EXPECT_THROW(analytic_single_excitation_state(p, 0, 1.0), RegimeViolation);
    EXPECT_THROW(analytic_single_excitation_state(SystemParams::uniform(2, 0, 0, 1, 1), 2, 1.0), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Superradiant / subradiant superpositions

TEST(Superposition, SubradiantIsStationary) {
    const auto p = SystemParams::uniform(4, 0.0, 0.0, 1.0, 1.0);
    const auto d = dark_state_vector(4);
    const double h = 1e-4;
    for (int i = 0; i <= 50; ++i) {
        const double t = 1.0 * i;
        const auto s = superposition_evolution(0.0, 1.0, p, t);
        const auto a = superposition_evolution(0.0, 1.0, p, t + h);
        double deriv = 0.0;
        for (int j = 0; j < 4; ++j) {
            deriv += std::norm((a.atoms[static_cast<std::size_t>(j)] - s.atoms[static_cast<std::size_t>(j)]) / h);
            EXPECT_LT(std::abs(s.atoms[static_cast<std::size_t>(j)] - d(j)), 1e-12);
        }
        EXPECT_LT(std::sqrt(deriv), 1e-10);
        EXPECT_LT(s.field_norm, 1e-20);
    }
}

TEST(Superposition, SuperradiantEmits) {
    for (int n : {2, 3, 5}) {
        const auto s = superposition_evolution(1.0, 0.0, SystemParams::uniform(n, 0.0, 0.0, 1.0, 1.0), 50.0);
        double atoms = 0.0;
        for (const auto& a : s.atoms) atoms += std::norm(a);
        EXPECT_LT(atoms, 1e-6);
        EXPECT_NEAR(s.field_norm, 1.0, 1e-4);
    }
}

TEST(Superposition, BalancedMixtureNormalised) {
    const auto p = SystemParams::uniform(2, 0.0, 0.3, 1.0, 1.0);
    const cplx a = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < 10; ++i) {
        const auto s = superposition_evolution(a, a, p, 0.7 * i, 0.01);
        double total = std::norm(s.cavity) + s.field_norm;
        for (const auto& v : s.atoms) total += std::norm(v);
        EXPECT_NEAR(total, 1.0, 1e-6);
    }
}

TEST(Superposition, NormViolation) {
    EXPECT_THROW(superposition_evolution(1.0, 1.0, SystemParams::uniform(2, 0, 0, 1, 1), 1.0), NormViolation);
}
