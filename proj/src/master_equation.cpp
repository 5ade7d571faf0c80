// master_equation.cpp — RK4 integration of the vacuum master equation and of
// the single-photon Fock-state hierarchy.

#include "tavis/master_equation.hpp"

#include "tavis/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace tavis {

namespace {

// Precomputed pieces of the generator:  L* X = -i (K X - X K^dag) + L X L^dag
// with K = H - (i/2) L^dag L.
struct Generator {
    CMatrix k, k_adj, l, l_adj;

    Generator(const CMatrix& h, const CMatrix& coupling) {
        if (h.rows() != h.cols() || coupling.rows() != h.rows() || coupling.cols() != h.cols())
            throw DimensionMismatch("master equation: H and L must be square and of equal size");
        l = coupling;
        l_adj = coupling.adjoint();
        k = h - 0.5 * kI * (l_adj * l);
        k_adj = k.adjoint();
    }

    CMatrix apply(const CMatrix& x) const {
        CMatrix lx(x.rows(), x.cols());
        lx.noalias() = l * x;
        CMatrix out(x.rows(), x.cols());
        out.noalias() = lx * l_adj;
        out.noalias() -= kI * (k * x);
        out.noalias() += kI * (x * k_adj);
        return out;
    }
};

void check_state(const CMatrix& rho, Eigen::Index dim, const char* who) {
    if (rho.rows() != dim || rho.cols() != dim)
        throw DimensionMismatch(std::string(who) + ": initial state has the wrong dimension");
}

struct StepPlan {
    std::size_t steps;
    double h;
};

StepPlan plan_steps(const IntegrationOptions& o) {
    if (!(o.dt > 0.0) || !std::isfinite(o.dt)) throw InvalidArgument("integration: dt must be positive");
    if (!(o.t_end >= o.t_start)) throw InvalidArgument("integration: t_end must not precede t_start");
    if (o.sample_stride == 0) throw InvalidArgument("integration: sample_stride must be at least 1");
    const double span = o.t_end - o.t_start;
    // dt is an upper bound; the step is shrunk so the grid ends exactly at t_end.
    const auto steps = static_cast<std::size_t>(std::ceil(span / o.dt - 1e-9));
    return {steps, steps == 0 ? 0.0 : span / static_cast<double>(steps)};
}

bool is_sample(std::size_t step, std::size_t total, std::size_t stride) {
    return step % stride == 0 || step == total;
}

VacuumTrajectory run_vacuum(const Generator& g, const CMatrix& rho0, const IntegrationOptions& o,
                            std::size_t refine) {
    const auto [steps0, h0] = plan_steps(o);
    const std::size_t steps = steps0 * refine;
    const double h = h0 / static_cast<double>(refine);
    const std::size_t stride = o.sample_stride * refine;

    VacuumTrajectory tr;
    CMatrix rho = rho0;
    tr.times.push_back(o.t_start);
    tr.states.push_back(rho);
    for (std::size_t s = 1; s <= steps; ++s) {
        const CMatrix k1 = g.apply(rho);
        const CMatrix k2 = g.apply(rho + (0.5 * h) * k1);
        const CMatrix k3 = g.apply(rho + (0.5 * h) * k2);
        const CMatrix k4 = g.apply(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (is_sample(s, steps, stride)) {
            tr.times.push_back(o.t_start + static_cast<double>(s) * h);
            tr.states.push_back(rho);
        }
    }
    return tr;
}

struct Hier {
    CMatrix r11, r10, r01, r00;
};

Hier hier_rhs(const Generator& g, const Hier& x, cplx xi) {
    const cplx xc = std::conj(xi);
    Hier d;
    d.r11 = g.apply(x.r11);
    d.r11.noalias() += xi * (x.r01 * g.l_adj - g.l_adj * x.r01);
    d.r11.noalias() += xc * (g.l * x.r10 - x.r10 * g.l);
    d.r10 = g.apply(x.r10);
    d.r10.noalias() += xi * (x.r00 * g.l_adj - g.l_adj * x.r00);
    d.r01 = g.apply(x.r01);
    d.r01.noalias() += xc * (g.l * x.r00 - x.r00 * g.l);
    d.r00 = g.apply(x.r00);
    return d;
}

Hier axpy(const Hier& x, double a, const Hier& d) {
    return {x.r11 + a * d.r11, x.r10 + a * d.r10, x.r01 + a * d.r01, x.r00 + a * d.r00};
}

FockHierarchy to_public(const Hier& x, double t) {
    FockHierarchy f;
    f.t = t;
    f.rho11 = x.r11;
    f.rho10 = x.r10;
    f.rho01 = x.r01;
    f.rho00 = x.r00;
    return f;
}

FockTrajectory run_fock(const Generator& g, const PulseShape& xi, const CMatrix& rho0, const IntegrationOptions& o,
                        std::size_t refine) {
    const auto [steps0, h0] = plan_steps(o);
    const std::size_t steps = steps0 * refine;
    const double h = h0 / static_cast<double>(refine);
    const std::size_t stride = o.sample_stride * refine;
    const auto dim = rho0.rows();

    Hier x{rho0, CMatrix::Zero(dim, dim), CMatrix::Zero(dim, dim), rho0};
    FockTrajectory tr;
    tr.times.push_back(o.t_start);
    tr.states.push_back(to_public(x, o.t_start));
    for (std::size_t s = 1; s <= steps; ++s) {
        const double t = o.t_start + static_cast<double>(s - 1) * h;
        const cplx ua = xi.at(t);
        const cplx um = xi.at(t + 0.5 * h);
        const cplx ub = xi.at(t + h);
        const Hier k1 = hier_rhs(g, x, ua);
        const Hier k2 = hier_rhs(g, axpy(x, 0.5 * h, k1), um);
        const Hier k3 = hier_rhs(g, axpy(x, 0.5 * h, k2), um);
        const Hier k4 = hier_rhs(g, axpy(x, h, k3), ub);
        const double w = h / 6.0;
        x.r11 += w * (k1.r11 + 2.0 * k2.r11 + 2.0 * k3.r11 + k4.r11);
        x.r10 += w * (k1.r10 + 2.0 * k2.r10 + 2.0 * k3.r10 + k4.r10);
        x.r01 += w * (k1.r01 + 2.0 * k2.r01 + 2.0 * k3.r01 + k4.r01);
        x.r00 += w * (k1.r00 + 2.0 * k2.r00 + 2.0 * k3.r00 + k4.r00);
        if (is_sample(s, steps, stride)) {
            const double ts = o.t_start + static_cast<double>(s) * h;
            tr.times.push_back(ts);
            tr.states.push_back(to_public(x, ts));
        }
    }
    return tr;
}

double population_gap(const CMatrix& a, const CMatrix& b) {
    return (a.diagonal() - b.diagonal()).cwiseAbs().maxCoeff();
}

void enforce_halving(double err, const char* who) {
    if (err > kStepHalvingTolerance)
        throw StepTooLarge(std::string(who) + ": populations change by " + std::to_string(err) +
                           " when the step is halved; reduce dt");
}

double default_dt(const SystemParams& p) { return p.kappa > 0.0 ? 0.005 / p.kappa : 0.005; }

// H_TC conserves the excitation number and L lowers it, so the states whose
// excitation does not exceed that of rho0 (plus any photons fed in) form an
// invariant subspace. Integrating there is exact and much cheaper.
struct ExcitationSubspace {
    std::vector<Eigen::Index> index;
    Eigen::Index full_dim = 0;

    ExcitationSubspace(const TruncatedBasis& basis, const CMatrix& rho0, int extra_excitations) {
        full_dim = static_cast<Eigen::Index>(basis.dimension());
        check_state(rho0, full_dim, "master equation");
        int top = 0;
        for (Eigen::Index i = 0; i < full_dim; ++i)
            if (rho0.row(i).cwiseAbs().maxCoeff() > 0.0 || rho0.col(i).cwiseAbs().maxCoeff() > 0.0)
                top = std::max(top, basis.excitation(static_cast<std::size_t>(i)));
        top += extra_excitations;
        for (Eigen::Index i = 0; i < full_dim; ++i)
            if (basis.excitation(static_cast<std::size_t>(i)) <= top) index.push_back(i);
    }

    CMatrix restrict(const CMatrix& m) const { return m(index, index); }

    CMatrix embed(const CMatrix& m) const {
        CMatrix out = CMatrix::Zero(full_dim, full_dim);
        out(index, index) = m;
        return out;
    }
};

}  // namespace

DensityDiagnostics inspect_density(const DensityMatrix& rho) {
    if (rho.rows() != rho.cols()) throw DimensionMismatch("inspect_density: matrix must be square");
    DensityDiagnostics d{};
    d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    d.trace_error = std::abs(rho.trace() - cplx(1.0));
    const CMatrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    return d;
}

FockHierarchy FockHierarchy::initial(const CVector& zeta) {
    const CMatrix rho = zeta * zeta.adjoint();
    const auto n = rho.rows();
    FockHierarchy f;
    f.rho11 = rho;
    f.rho00 = rho;
    f.rho10 = CMatrix::Zero(n, n);
    f.rho01 = CMatrix::Zero(n, n);
    return f;
}

DensityMatrix lindblad_rhs(const DensityMatrix& rho, const CMatrix& h, const CMatrix& l) {
    const Generator g(h, l);
    check_state(rho, h.rows(), "lindblad_rhs");
    return g.apply(rho);
}

VacuumTrajectory integrate_vacuum_master(const CMatrix& h, const CMatrix& l, const DensityMatrix& rho0,
                                         const IntegrationOptions& options) {
    const Generator g(h, l);
    check_state(rho0, h.rows(), "integrate_vacuum_master");
    VacuumTrajectory tr = run_vacuum(g, rho0, options, 1);
    if (options.check_step_halving) {
        const VacuumTrajectory fine = run_vacuum(g, rho0, options, 2);
        double err = 0.0;
        for (std::size_t i = 0; i < tr.states.size(); ++i)
            err = std::max(err, population_gap(tr.states[i], fine.states[i]));
        tr.halving_error = err;
        enforce_halving(err, "integrate_vacuum_master");
    }
    return tr;
}

VacuumTrajectory integrate_vacuum_master(const SystemParams& params, const TruncatedBasis& basis,
                                         const DensityMatrix& rho0, const IntegrationOptions& options) {
    params.validate();
    const ExcitationSubspace sub(basis, rho0, 0);
    VacuumTrajectory tr = integrate_vacuum_master(sub.restrict(build_hamiltonian(params, basis).matrix()),
                                                  sub.restrict(build_coupling(params, basis).matrix()),
                                                  sub.restrict(rho0), options);
    for (auto& rho : tr.states) rho = sub.embed(rho);
    return tr;
}

FockTrajectory integrate_fock_master(const CMatrix& h, const CMatrix& l, const PulseShape& xi,
                                     const DensityMatrix& rho0, const IntegrationOptions& options) {
    const Generator g(h, l);
    check_state(rho0, h.rows(), "integrate_fock_master");
    FockTrajectory tr = run_fock(g, xi, rho0, options, 1);
    if (options.check_step_halving) {
        const FockTrajectory fine = run_fock(g, xi, rho0, options, 2);
        double err = 0.0;
        for (std::size_t i = 0; i < tr.states.size(); ++i) {
            err = std::max(err, population_gap(tr.states[i].rho11, fine.states[i].rho11));
            err = std::max(err, population_gap(tr.states[i].rho00, fine.states[i].rho00));
        }
        tr.halving_error = err;
        enforce_halving(err, "integrate_fock_master");
    }
    return tr;
}

FockTrajectory integrate_fock_master(const SystemParams& params, const TruncatedBasis& basis, const PulseShape& xi,
                                     const DensityMatrix& rho0, const IntegrationOptions& options) {
    params.validate();
    const ExcitationSubspace sub(basis, rho0, 1);
    FockTrajectory tr = integrate_fock_master(sub.restrict(build_hamiltonian(params, basis).matrix()),
                                              sub.restrict(build_coupling(params, basis).matrix()), xi,
                                              sub.restrict(rho0), options);
    for (auto& f : tr.states) {
        f.rho11 = sub.embed(f.rho11);
        f.rho10 = sub.embed(f.rho10);
        f.rho01 = sub.embed(f.rho01);
        f.rho00 = sub.embed(f.rho00);
    }
    return tr;
}

CMatrix reduce_to_atom1(const DensityMatrix& rho, const TruncatedBasis& basis) {
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    check_state(rho, dim, "reduce_to_atom1");
    if (basis.n_atoms() < 1) throw InvalidArgument("reduce_to_atom1: the basis has no atoms");
    // Pair each |e, rest> with |g, rest>: clearing the atom-1 bit shifts the index by a fixed offset.
    const auto offset = static_cast<Eigen::Index>(basis.atom_bit(0)) * (basis.max_cavity_photons() + 1);
    CMatrix out = CMatrix::Zero(2, 2);
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (!basis.atom_excited(static_cast<std::size_t>(i), 0)) continue;
        const Eigen::Index ig = i - offset;
        out(0, 0) += rho(i, i);
        out(0, 1) += rho(i, ig);
        out(1, 0) += rho(ig, i);
        out(1, 1) += rho(ig, ig);
    }
    return out;
}

double atom_excitation(const DensityMatrix& rho, const TruncatedBasis& basis, int atom) {
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    check_state(rho, dim, "atom_excitation");
    if (atom < 0 || atom >= basis.n_atoms()) throw InvalidArgument("atom_excitation: atom index out of range");
    double p = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i)
        if (basis.atom_excited(static_cast<std::size_t>(i), atom)) p += rho(i, i).real();
    return p;
}

SteadyStateResult steady_state(const CMatrix& h, const CMatrix& l, const DensityMatrix& rho0,
                               const SteadyStateOptions& options) {
    const Generator g(h, l);
    check_state(rho0, h.rows(), "steady_state");
    if (!(options.dt > 0.0) || !(options.t_max > 0.0) || !(options.check_interval > 0.0))
        throw InvalidArgument("steady_state: dt, t_max and check_interval must be positive");

    const auto per_check = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(options.check_interval / options.dt)));
    SteadyStateResult res;
    res.rho = rho0;
    res.residual = g.apply(rho0).cwiseAbs().maxCoeff();
    const double step = options.dt;
    while (res.residual >= options.residual_tolerance) {
        if (res.t >= options.t_max)
            throw NonConvergence("steady_state: generator residual " + std::to_string(res.residual) +
                                 " still above tolerance at t = " + std::to_string(res.t));
        CMatrix& rho = res.rho;
        for (std::size_t s = 0; s < per_check; ++s) {
            const CMatrix k1 = g.apply(rho);
            const CMatrix k2 = g.apply(rho + (0.5 * step) * k1);
            const CMatrix k3 = g.apply(rho + (0.5 * step) * k2);
            const CMatrix k4 = g.apply(rho + step * k3);
            rho += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        res.t += static_cast<double>(per_check) * step;
        res.residual = g.apply(rho).cwiseAbs().maxCoeff();
    }
    return res;
}

SteadyStateResult steady_state(const SystemParams& params, const TruncatedBasis& basis, const DensityMatrix& rho0,
                               const SteadyStateOptions& options) {
    params.validate();
    if (!(params.kappa > 0.0)) throw RegimeViolation("steady_state: requires kappa > 0");
    SteadyStateOptions o = options;
    if (o.dt == 0.0) o.dt = default_dt(params);
    if (o.t_max == 0.0) o.t_max = 200.0 / params.kappa;
    if (o.check_interval == 0.0) o.check_interval = 1.0 / params.kappa;
    const ExcitationSubspace sub(basis, rho0, 0);
    SteadyStateResult res = steady_state(sub.restrict(build_hamiltonian(params, basis).matrix()),
                                         sub.restrict(build_coupling(params, basis).matrix()), sub.restrict(rho0), o);
    res.rho = sub.embed(res.rho);
    return res;
}

}  // namespace tavis
