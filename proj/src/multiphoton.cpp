// multiphoton.cpp — propagator, transition matrix, sector wavefunctions,
// streamed sector norms, steady multi-photon output and exponent fitting.

#include "tavis/multiphoton.hpp"

#include "tavis/errors.hpp"
#include "tavis/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>

namespace tavis {

namespace {

constexpr double kGridSnap = 1e-9;

CMatrix expm_step(const CMatrix& h, double dt) {
    const CMatrix gen = (-kI * dt) * h;
    return gen.exp();
}

std::size_t cells_for(double t, double step, const char* who) {
    if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument(std::string(who) + ": step must be positive");
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument(std::string(who) + ": time must be non-negative");
    const double x = t / step;
    const double r = std::round(x);
    if (std::abs(x - r) > kGridSnap * std::max(1.0, x))
        throw InvalidArgument(std::string(who) + ": time " + std::to_string(t) + " is not a multiple of the step");
    return static_cast<std::size_t>(r);
}

std::size_t binom(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Tuples with k entries drawn from [first, n) in non-decreasing order.
std::size_t tuples_from(std::size_t k, std::size_t n, std::size_t first) {
    if (k == 0) return 1;
    if (first >= n) return 0;
    return binom(n - first + k - 1, k);
}

std::size_t rank_from(const std::vector<std::size_t>& t, std::size_t pos, std::size_t k, std::size_t n,
                      std::size_t base) {
    if (k == 0) return 0;
    const std::size_t i = t[pos] - base;
    const std::size_t offset = tuples_from(k, n, 0) - tuples_from(k, n, i);
    return offset + rank_from(t, pos + 1, k - 1, n - i, base + i);
}

// Next tuple in lexicographic order; false after the last one.
bool next_tuple(std::vector<std::size_t>& t, std::size_t n) {
    for (std::size_t p = t.size(); p-- > 0;) {
        if (t[p] + 1 < n) {
            const std::size_t v = t[p] + 1;
            for (std::size_t q = p; q < t.size(); ++q) t[q] = v;
            return true;
        }
    }
    return false;
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

struct ModelOperators {
    CMatrix h_eff;
    CMatrix l;
};

ModelOperators operators_for(const SystemParams& params, const TruncatedBasis& basis) {
    params.validate();
    if (params.n_atoms != basis.n_atoms()) throw DimensionMismatch("multiphoton: basis and parameters disagree on N");
    return {build_effective_hamiltonian(params, basis).matrix(), build_coupling(params, basis).matrix()};
}

}  // namespace

// ---------------------------------------------------------------- propagator

std::size_t Propagator::node_of(double t) const {
    const double x = (t - grid.t_start) / grid.dt;
    const double r = std::round(x);
    if (r < 0.0 || r >= static_cast<double>(grid.n_points) || std::abs(x - r) > kGridSnap * std::max(1.0, std::abs(x)))
        throw InvalidArgument("Propagator: time " + std::to_string(t) + " is not a node of the grid");
    return static_cast<std::size_t>(r);
}

namespace {

void check_propagator_grid(const TimeGrid& grid, Eigen::Index rows, Eigen::Index cols) {
    if (rows != cols) throw DimensionMismatch("compute_propagator: H_eff must be square");
    if (grid.n_points == 0 || !(grid.dt > 0.0)) throw InvalidArgument("compute_propagator: empty grid");
    if (grid.t_start != 0.0) throw InvalidArgument("compute_propagator: the grid must start at t = 0");
}

std::vector<CMatrix> rk4_propagate(const HamiltonianProvider& h, const TimeGrid& grid, Eigen::Index dim, int sub) {
    std::vector<CMatrix> v;
    v.reserve(grid.n_points);
    CMatrix cur = CMatrix::Identity(dim, dim);
    v.push_back(cur);
    const double dt = grid.dt / sub;
    auto f = [&](double t, const CMatrix& x) -> CMatrix { return (-kI) * (h(t) * x); };
    for (std::size_t i = 0; i + 1 < grid.n_points; ++i) {
        for (int s = 0; s < sub; ++s) {
            const double t = grid.time(i) + s * dt;
            const CMatrix k1 = f(t, cur);
            const CMatrix k2 = f(t + 0.5 * dt, cur + (0.5 * dt) * k1);
            const CMatrix k3 = f(t + 0.5 * dt, cur + (0.5 * dt) * k2);
            const CMatrix k4 = f(t + dt, cur + dt * k3);
            cur += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        v.push_back(cur);
    }
    return v;
}

}  // namespace

Propagator compute_propagator(const CMatrix& h_eff, const TimeGrid& grid) {
    check_propagator_grid(grid, h_eff.rows(), h_eff.cols());
    Propagator p;
    p.grid = grid;
    p.constant = true;
    const CMatrix s = expm_step(h_eff, grid.dt);
    p.v.reserve(grid.n_points);
    CMatrix cur = CMatrix::Identity(h_eff.rows(), h_eff.cols());
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        p.v.push_back(cur);
        cur = s * cur;
    }
    return p;
}

Propagator compute_propagator(const HamiltonianProvider& h_eff, const TimeGrid& grid) {
    if (!h_eff) throw InvalidArgument("compute_propagator: empty Hamiltonian provider");
    const CMatrix h0 = h_eff(0.0);
    check_propagator_grid(grid, h0.rows(), h0.cols());
    const auto coarse = rk4_propagate(h_eff, grid, h0.rows(), 1);
    auto fine = rk4_propagate(h_eff, grid, h0.rows(), 2);
    double err = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) err = std::max(err, (coarse[i] - fine[i]).cwiseAbs().maxCoeff());
    if (err > kPropagatorHalvingTolerance)
        throw StepTooLarge("compute_propagator: entries change by " + std::to_string(err) +
                           " when the step is halved; refine the grid");
    Propagator p;
    p.grid = grid;
    p.constant = false;
    p.v = std::move(fine);
    return p;
}

TransitionMatrix transition_matrix(const Propagator& prop, double t, double tau) {
    const CMatrix& vt = prop.at(t);
    const CMatrix& vs = prop.at(tau);
    Eigen::JacobiSVD<CMatrix> svd(vs);
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    if (!(cond <= kMaxConditionNumber))
        throw IllConditioned("transition_matrix: V(" + std::to_string(tau) + ") has condition number " +
                             std::to_string(cond));
    TransitionMatrix g;
    g.t = t;
    g.tau = tau;
    g.condition = cond;
    g.value = vt * vs.partialPivLu().inverse();
    return g;
}

CVector recursion_step_direct(const Propagator& prop, const CMatrix& l, double t, double s, const CVector& eta_t) {
    if (s > t) throw InvalidArgument("recursion_step_direct: emission time lies after t");
    const CMatrix forward = transition_matrix(prop, t, s).value;
    const CMatrix back = transition_matrix(prop, s, t).value;  // G(t, s)^{-1}
    return forward * (l * (back * eta_t));
}

// ------------------------------------------------------------ sector blocks

SectorBlocks SectorBlocks::build(const CMatrix& h_eff, const CMatrix& l, const TruncatedBasis& basis, int top,
                                 double step) {
    const auto k = static_cast<Eigen::Index>(basis.dimension());
    if (h_eff.rows() != k || h_eff.cols() != k || l.rows() != k || l.cols() != k)
        throw DimensionMismatch("SectorBlocks: operators do not match the basis");
    if (top < 0) throw InvalidArgument("SectorBlocks: negative excitation");
    const double scale = std::max(1.0, h_eff.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            const int ei = basis.excitation(static_cast<std::size_t>(i));
            const int ej = basis.excitation(static_cast<std::size_t>(j));
            if (ei != ej && std::abs(h_eff(i, j)) > 1e-14 * scale)
                throw InvalidArgument("SectorBlocks: H_eff does not conserve the excitation number");
            if (ei != ej - 1 && std::abs(l(i, j)) > 0.0)
                throw InvalidArgument("SectorBlocks: L must lower the excitation number by one");
        }
    }
    SectorBlocks b;
    b.top = top;
    b.step = step;
    for (int j = 0; j <= top; ++j) {
        const auto sector = basis.excitation_sector(j);
        b.index.emplace_back(sector.begin(), sector.end());
    }
    if (b.index.back().empty()) throw ExcitationOverflow("SectorBlocks: the basis has no states at the top excitation");
    for (int j = 0; j <= top; ++j) {
        std::vector<Eigen::Index> ij(b.index[j].begin(), b.index[j].end());
        b.propagator.push_back(expm_step(h_eff(ij, ij), step));
        b.half_propagator.push_back(expm_step(h_eff(ij, ij), 0.5 * step));
        if (j == 0) {
            b.jump.emplace_back();
        } else {
            std::vector<Eigen::Index> il(b.index[j - 1].begin(), b.index[j - 1].end());
            b.jump.push_back(l(il, ij));
        }
    }
    return b;
}

// ------------------------------------------------------------ simplex index

SimplexIndex::SimplexIndex(int k, std::size_t n_cells) : k_(k), n_(n_cells) {
    if (k < 0) throw InvalidArgument("SimplexIndex: negative photon count");
    size_ = tuples_from(static_cast<std::size_t>(k), n_, 0);
    if (k > 0) {
        offsets_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) offsets_[i] = size_ - tuples_from(static_cast<std::size_t>(k), n_, i);
    }
}

std::size_t SimplexIndex::block_size(std::size_t first) const {
    if (k_ == 0 || first >= n_) return 0;
    return tuples_from(static_cast<std::size_t>(k_ - 1), n_, first);
}

std::size_t SimplexIndex::rank(const std::vector<std::size_t>& tuple) const {
    if (tuple.size() != static_cast<std::size_t>(k_)) throw DimensionMismatch("SimplexIndex::rank: wrong tuple length");
    for (std::size_t p = 0; p < tuple.size(); ++p)
        if (tuple[p] >= n_ || (p > 0 && tuple[p] < tuple[p - 1]))
            throw InvalidArgument("SimplexIndex::rank: tuple is not ordered within the grid");
    return rank_from(tuple, 0, static_cast<std::size_t>(k_), n_, 0);
}

std::vector<std::size_t> SimplexIndex::unrank(std::size_t r) const {
    if (r >= size_) throw InvalidArgument("SimplexIndex::unrank: rank out of range");
    std::vector<std::size_t> t;
    std::size_t base = 0, n = n_;
    for (auto k = static_cast<std::size_t>(k_); k > 0; --k) {
        // Largest i with offset(i) <= r, where offset(i) = total - tuples_from(k, n, i).
        const std::size_t total = tuples_from(k, n, 0);
        std::size_t lo = 0, hi = n - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi + 1) / 2;
            if (total - tuples_from(k, n, mid) <= r) lo = mid;
            else hi = mid - 1;
        }
        r -= total - tuples_from(k, n, lo);
        t.push_back(base + lo);
        base += lo;
        n -= lo;
    }
    return t;
}

double SimplexIndex::weight(const std::vector<std::size_t>& tuple, double step) {
    double w = 1.0;
    int run = 0;
    for (std::size_t p = 0; p < tuple.size(); ++p) {
        run = (p > 0 && tuple[p] == tuple[p - 1]) ? run + 1 : 1;
        w *= step / run;
    }
    return w;
}

// ---------------------------------------------------------------- sectors

CVector SectorWavefunction::at(std::size_t node, std::size_t basis_dim) const {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(basis_dim));
    const std::size_t d = support.size();
    if (node >= nodes()) throw InvalidArgument("SectorWavefunction::at: node out of range");
    for (std::size_t s = 0; s < d; ++s) v(static_cast<Eigen::Index>(support[s])) = values[node * d + s];
    return v;
}

int initial_excitation(const CVector& eta0, const TruncatedBasis& basis) {
    if (static_cast<std::size_t>(eta0.size()) != basis.dimension())
        throw DimensionMismatch("initial state does not match the basis dimension");
    if (std::abs(eta0.norm() - 1.0) > 1e-9) throw NormViolation("initial state must have unit norm");
    int exc = -1;
    for (Eigen::Index i = 0; i < eta0.size(); ++i) {
        if (eta0(i) == cplx(0.0)) continue;
        const int e = basis.excitation(static_cast<std::size_t>(i));
        if (exc >= 0 && e != exc)
            throw InvalidArgument("initial state must lie in a single excitation sector");
        exc = e;
    }
    return exc;
}

std::vector<SectorWavefunction> sector_wavefunctions(const SystemParams& params, const TruncatedBasis& basis,
                                                     const CVector& eta0, double t, double step, int max_k,
                                                     const MultiPhotonOptions& options) {
    const auto ops = operators_for(params, basis);
    const int top = initial_excitation(eta0, basis);
    if (max_k < 0) throw InvalidArgument("sector_wavefunctions: max_k must be non-negative");
    if (max_k > top)
        throw ExcitationOverflow("sector_wavefunctions: " + std::to_string(max_k) + " photons requested but the " +
                                 "initial state holds " + std::to_string(top) + " excitations");
    const std::size_t n = cells_for(t, step, "sector_wavefunctions");
    const SectorBlocks blocks = SectorBlocks::build(ops.h_eff, ops.l, basis, top, step);
    const std::vector<Eigen::Index> top_idx(blocks.index[top].begin(), blocks.index[top].end());
    const CVector eta_top = eta0(top_idx);

    std::vector<SectorWavefunction> out;
    for (int k = 0; k <= max_k; ++k) {
        SectorWavefunction s;
        s.photons = k;
        s.t = t;
        s.step = step;
        s.cells = n;
        s.support = blocks.index[static_cast<std::size_t>(top - k)];
        const std::size_t d = s.support.size();
        if (k == 0) {
            CVector v = eta_top;
            for (std::size_t i = 0; i < n; ++i) v = blocks.propagator[top] * v;
            s.values.assign(v.data(), v.data() + v.size());
            s.norm = v.squaredNorm();
        } else if (n > 0 && d > 0) {
            const SimplexIndex idx(k, n);
            if (idx.size() > options.max_values / std::max<std::size_t>(d, 1))
                throw InvalidArgument("sector_wavefunctions: " + std::to_string(idx.size()) + " nodes for " +
                                      std::to_string(k) + " photons exceed the storage cap; use a coarser step " +
                                      "or sector_norm_history");
            const auto chains = kernels::SimplexChains::prepare(blocks, eta_top, k, n);
            s.values = kernels::simplex_values(chains, options.threads);
            std::vector<std::size_t> tuple(static_cast<std::size_t>(k), 0);
            double norm = 0.0;
            std::size_t node = 0;
            do {
                double p = 0.0;
                for (std::size_t j = 0; j < d; ++j) p += std::norm(s.values[node * d + j]);
                norm += SimplexIndex::weight(tuple, step) * p;
                ++node;
            } while (next_tuple(tuple, n));
            s.norm = norm;
        }
        out.push_back(std::move(s));
    }
    return out;
}

double SectorNormHistory::total(std::size_t i) const {
    double t = 0.0;
    for (const auto& k : norms) t += k[i];
    return t;
}

SectorNormHistory sector_norm_history(const SystemParams& params, const TruncatedBasis& basis, const CVector& eta0,
                                      double t_max, double step, std::size_t stride) {
    const auto ops = operators_for(params, basis);
    const int top = initial_excitation(eta0, basis);
    const std::size_t n = cells_for(t_max, step, "sector_norm_history");
    if (stride == 0) throw InvalidArgument("sector_norm_history: stride must be at least 1");
    const SectorBlocks b = SectorBlocks::build(ops.h_eff, ops.l, basis, top, step);
    const auto ku = static_cast<std::size_t>(top);

    // a[k]: weighted sum of |eta><eta| over nodes whose emissions all lie before now.
    // e[k][r]: nodes emitting their last photon at the current midpoint, with a
    // trailing run of r equal indices.
    std::vector<CMatrix> a(ku + 1);
    for (std::size_t k = 0; k <= ku; ++k) {
        const auto d = static_cast<Eigen::Index>(b.dim(top - static_cast<int>(k)));
        a[k] = CMatrix::Zero(d, d);
    }
    const std::vector<Eigen::Index> top_idx(b.index[ku].begin(), b.index[ku].end());
    const CVector eta_top = eta0(top_idx);
    a[0] = eta_top * eta_top.adjoint();
    std::vector<std::vector<CMatrix>> e(ku + 1, std::vector<CMatrix>(ku + 1));

    SectorNormHistory h;
    h.step = step;
    h.norms.assign(ku + 1, {});
    for (std::size_t k = 0; k <= ku; ++k) h.support.push_back(b.index[ku - k]);

    for (std::size_t m = 0;; ++m) {
        if (m % stride == 0 || m == n) {
            h.times.push_back(static_cast<double>(m) * step);
            for (std::size_t k = 0; k <= ku; ++k) h.norms[k].push_back(a[k].trace().real());
        }
        if (m == n) break;
        for (std::size_t k = 0; k <= ku; ++k) {
            const CMatrix& hs = b.half_propagator[ku - k];
            a[k] = hs * a[k] * hs.adjoint();
        }
        for (std::size_t k = 1; k <= ku; ++k) {
            const CMatrix& l = b.jump[ku - k + 1];
            e[k][1] = step * (l * a[k - 1] * l.adjoint());
            for (std::size_t r = 2; r <= k; ++r)
                e[k][r] = (step / static_cast<double>(r)) * (l * e[k - 1][r - 1] * l.adjoint());
        }
        for (std::size_t k = 0; k <= ku; ++k) {
            CMatrix acc = a[k];
            for (std::size_t r = 1; r <= k; ++r) acc += e[k][r];
            const CMatrix& hs = b.half_propagator[ku - k];
            a[k] = hs * acc * hs.adjoint();
        }
    }
    for (std::size_t k = 0; k <= ku; ++k) {
        std::vector<double> d(static_cast<std::size_t>(a[k].rows()));
        for (Eigen::Index i = 0; i < a[k].rows(); ++i) d[static_cast<std::size_t>(i)] = a[k](i, i).real();
        h.final_populations.push_back(std::move(d));
    }
    return h;
}

// ---------------------------------------------------------------- steady output

const OutputBranch* SteadyOutputState::find(int photons, std::size_t basis_index) const {
    for (const auto& b : branches)
        if (b.photons == photons && b.basis_index == basis_index) return &b;
    return nullptr;
}

SteadyOutputState steady_output_state(const SystemParams& params, const TruncatedBasis& basis, const CVector& eta0,
                                      const SteadyOutputOptions& options) {
    const int top = initial_excitation(eta0, basis);
    const std::size_t n = cells_for(options.t_max, options.step, "steady_output_state");
    const auto hist = sector_norm_history(params, basis, eta0, options.t_max, options.step, std::max<std::size_t>(n, 1));

    SteadyOutputState out;
    out.t_max = options.t_max;
    out.step = options.step;
    out.cells = n;
    for (int k = 0; k <= top; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        out.sector_norms.push_back(hist.norms[ku].back());
        for (std::size_t s = 0; s < hist.support[ku].size(); ++s) {
            const std::size_t idx = hist.support[ku][s];
            const double pop = std::max(0.0, hist.final_populations[ku][s]);
            if (basis.photons(idx) > 0) out.residual_cavity = std::max(out.residual_cavity, std::sqrt(pop));
            else if (basis.decode(idx).first != 0) out.residual_system_excitation += pop;
        }
    }
    if (out.residual_cavity > options.cavity_tolerance)
        throw NonConvergence("steady_output_state: cavity amplitude " + std::to_string(out.residual_cavity) +
                             " remains at t_max = " + std::to_string(options.t_max) + "; increase t_max");

    const int pulse_k = std::min(top, std::max(0, options.pulse_photons_max));
    const auto sectors =
        sector_wavefunctions(params, basis, eta0, options.t_max, options.step, pulse_k, options.multiphoton);
    for (int k = 0; k <= top; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        for (std::size_t s = 0; s < hist.support[ku].size(); ++s) {
            const std::size_t idx = hist.support[ku][s];
            const double pop = hist.final_populations[ku][s];
            if (basis.photons(idx) > 0 || !(pop > options.branch_cutoff)) continue;
            OutputBranch br;
            br.photons = k;
            br.basis_index = idx;
            br.amplitude = std::sqrt(pop);
            if (k <= pulse_k) {
                const auto& sec = sectors[ku];
                const std::size_t d = sec.support.size();
                if (k == 0) {
                    br.system_value = sec.values[s];
                } else {
                    br.pulse.resize(sec.nodes());
                    for (std::size_t node = 0; node < sec.nodes(); ++node)
                        br.pulse[node] = sec.values[node * d + s] / br.amplitude;
                }
            }
            out.branches.push_back(std::move(br));
        }
    }
    return out;
}

// ---------------------------------------------------------------- plotting

namespace {

template <class Probability>
SymmetricDensity symmetrize(int k, std::size_t n, double step, double scale, Probability prob) {
    if (k < 1) throw InvalidArgument("symmetrize_for_plot: at least one photon is required");
    SymmetricDensity out;
    out.photons = k;
    out.cells = n;
    out.step = step;
    std::size_t total = 1;
    for (int i = 0; i < k; ++i) total *= n;
    out.density.resize(total);
    const SimplexIndex idx(k, n);
    std::vector<std::size_t> cube(static_cast<std::size_t>(k), 0), sorted;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (int p = k - 1; p >= 0; --p) {
            cube[static_cast<std::size_t>(p)] = rest % n;
            rest /= n;
        }
        sorted = cube;
        std::sort(sorted.begin(), sorted.end());
        out.density[flat] = scale * prob(idx.rank(sorted));
    }
    return out;
}

}  // namespace

SymmetricDensity symmetrize_for_plot(const SectorWavefunction& sector) {
    const std::size_t d = sector.support.size();
    const double scale = sector.norm > 0.0 ? 1.0 / (factorial(sector.photons) * sector.norm) : 0.0;
    return symmetrize(sector.photons, sector.cells, sector.step, scale, [&](std::size_t node) {
        double p = 0.0;
        for (std::size_t j = 0; j < d; ++j) p += std::norm(sector.values[node * d + j]);
        return p;
    });
}

SymmetricDensity symmetrize_for_plot(const std::vector<cplx>& pulse, int photons, std::size_t cells, double step) {
    if (pulse.size() != SimplexIndex(photons, cells).size())
        throw DimensionMismatch("symmetrize_for_plot: pulse length does not match the simplex grid");
    return symmetrize(photons, cells, step, 1.0 / factorial(photons),
                      [&](std::size_t node) { return std::norm(pulse[node]); });
}

// ---------------------------------------------------------------- exponent fit

ExponentialFit fit_exponentials(const std::vector<cplx>& samples, double dt, int order) {
    const auto m = static_cast<Eigen::Index>(samples.size());
    if (order < 1) throw InvalidArgument("fit_exponentials: order must be positive");
    if (!(dt > 0.0)) throw InvalidArgument("fit_exponentials: dt must be positive");
    const Eigen::Index pencil = m / 2;
    if (pencil < order || m - pencil < order) throw GridTooShort("fit_exponentials: too few samples for the order");

    CMatrix y(m - pencil, pencil + 1);
    for (Eigen::Index i = 0; i < y.rows(); ++i)
        for (Eigen::Index j = 0; j < y.cols(); ++j) y(i, j) = samples[static_cast<std::size_t>(i + j)];
    Eigen::BDCSVD<CMatrix> svd(y, Eigen::ComputeThinV);
    const CMatrix vp = svd.matrixV().leftCols(order);
    const CMatrix v1 = vp.topRows(pencil);
    const CMatrix v2 = vp.bottomRows(pencil);
    // Shift invariance of the signal subspace: eigenvalues of V2^H V1 (V1^H V1)^{-1} are the poles.
    const CMatrix gram = v1.adjoint() * v1;
    const CMatrix z = (v2.adjoint() * v1) * gram.inverse();
    Eigen::ComplexEigenSolver<CMatrix> es(z, false);
    const CVector poles = es.eigenvalues();

    ExponentialFit fit;
    CMatrix vander(m, order);
    for (Eigen::Index j = 0; j < order; ++j) {
        fit.exponents.push_back(std::log(poles(j)) / dt);
        for (Eigen::Index i = 0; i < m; ++i) vander(i, j) = std::pow(poles(j), static_cast<double>(i));
    }
    CVector rhs(m);
    for (Eigen::Index i = 0; i < m; ++i) rhs(i) = samples[static_cast<std::size_t>(i)];
    const CVector amp = vander.colPivHouseholderQr().solve(rhs);
    fit.amplitudes.assign(amp.data(), amp.data() + amp.size());
    fit.relative_residual = (vander * amp - rhs).norm() / std::max(rhs.norm(), 1e-300);
    return fit;
}

}  // namespace tavis
