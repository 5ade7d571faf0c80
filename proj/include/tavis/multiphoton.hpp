// multiphoton.hpp — joint system-field state under vacuum input when several
// excitations are stored in the atoms and leave as a multi-photon pulse.
//
// With V' = -i H_eff V, V(0) = I and G(t, s) = V(t) V(s)^{-1}, the k-photon
// component of the joint state at time t is, for ordered emission times
// 0 <= t_1 <= ... <= t_k <= t,
//
//   |eta_t(t_1..t_k)> = G(t, t_k) L G(t_k, t_{k-1}) L ... L G(t_1, 0) |eta_0>.
//
// Everything here is evaluated on a uniform grid of step D: emission times sit
// at cell midpoints t_j = (i_j + 1/2) D with i_1 <= ... <= i_k, and the ordered
// simplex is integrated with the exact cell volumes D^k / prod(r!) (r the
// lengths of runs of equal indices), which makes the quadrature second order. G is never formed from V^{-1} outside
// validation code: the forward products use expm(-i H_eff D) directly.

#pragma once

#include "tavis/core_model.hpp"
#include "tavis/pulse.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace tavis {

// ---------------------------------------------------------------- propagator

inline constexpr double kPropagatorHalvingTolerance = 1e-8;
inline constexpr double kMaxConditionNumber = 1e12;

struct Propagator {
    TimeGrid grid;
    std::vector<CMatrix> v;  // V(t_i) at every grid node
    bool constant = true;

    // Grid node for time t; throws InvalidArgument when t is not on the grid.
    std::size_t node_of(double t) const;
    const CMatrix& at(double t) const { return v[node_of(t)]; }
};

using HamiltonianProvider = std::function<CMatrix(double t)>;

// Constant generator: V(t_{i+1}) = expm(-i H_eff dt) V(t_i). The grid must start at 0.
Propagator compute_propagator(const CMatrix& h_eff, const TimeGrid& grid);
// Time-dependent generator: RK4 per grid step, checked against a half-step run
// (StepTooLarge when any entry moves by more than kPropagatorHalvingTolerance).
Propagator compute_propagator(const HamiltonianProvider& h_eff, const TimeGrid& grid);

struct TransitionMatrix {
    double t = 0.0;
    double tau = 0.0;
    CMatrix value;            // G(t, tau)
    double condition = 1.0;   // 2-norm condition number of V(tau)
};

// G(t, tau) = V(t) V(tau)^{-1}. Throws IllConditioned when cond V(tau) > kMaxConditionNumber.
TransitionMatrix transition_matrix(const Propagator& prop, double t, double tau);

// One step of the inverse-based recursion: G(t, s) L G(t, s)^{-1} |eta_t(...)>
// adds an emission at time s <= t to a component already evaluated at t.
CVector recursion_step_direct(const Propagator& prop, const CMatrix& l, double t, double s, const CVector& eta_t);

// ------------------------------------------------------------ sector blocks

// H_eff conserves the excitation number and L lowers it by one, so both are
// stored per excitation sector j = 0..top.
struct SectorBlocks {
    int top = 0;
    double step = 0.0;
    std::vector<std::vector<std::size_t>> index;  // basis indices of sector j
    std::vector<CMatrix> propagator;              // expm(-i H_eff step) on sector j
    std::vector<CMatrix> half_propagator;         // expm(-i H_eff step / 2) on sector j
    std::vector<CMatrix> jump;                    // L from sector j to j - 1 (jump[0] is empty)

    std::size_t dim(int j) const { return index[static_cast<std::size_t>(j)].size(); }

    // Throws InvalidArgument when H_eff couples different sectors or L does
    // anything but lower the excitation by one.
    static SectorBlocks build(const CMatrix& h_eff, const CMatrix& l, const TruncatedBasis& basis, int top,
                              double step);
};

// ------------------------------------------------------------ simplex grid

// Ordered index tuples 0 <= i_1 <= ... <= i_k < n in lexicographic order.
class SimplexIndex {
public:
    SimplexIndex(int k, std::size_t n_cells);

    int photons() const noexcept { return k_; }
    std::size_t cells() const noexcept { return n_; }
    std::size_t size() const noexcept { return size_; }

    // Number of tuples whose first index is i (0 when k = 0).
    std::size_t block_size(std::size_t first) const;
    // Position of the first tuple with the given first index.
    std::size_t block_offset(std::size_t first) const { return offsets_[first]; }

    std::size_t rank(const std::vector<std::size_t>& tuple) const;
    std::vector<std::size_t> unrank(std::size_t r) const;

    // Cell volume D^k / prod(run length)! for the ordered simplex.
    static double weight(const std::vector<std::size_t>& tuple, double step);

private:
    int k_;
    std::size_t n_;
    std::size_t size_;
    std::vector<std::size_t> offsets_;
};

// ---------------------------------------------------------------- sectors

struct SectorWavefunction {
    int photons = 0;
    double t = 0.0;
    double step = 0.0;
    std::size_t cells = 0;              // t / step
    std::vector<std::size_t> support;   // basis indices of excitation R - k
    // Node-major: values[node * support.size() + s] is the amplitude on support[s]
    // at the node SimplexIndex(photons, cells).unrank(node), whose emission times
    // are (i_j + 1/2) step. For k = 0 there is one node.
    std::vector<cplx> values;
    double norm = 0.0;                  // weighted simplex sum of |eta|^2

    std::size_t nodes() const { return support.empty() ? 0 : values.size() / support.size(); }
    // Full K-dimensional vector at a node.
    CVector at(std::size_t node, std::size_t basis_dim) const;
};

struct MultiPhotonOptions {
    int threads = 1;
    // Explicit storage cap in complex numbers; finer grids must use sector_norm_history.
    std::size_t max_values = std::size_t{1} << 25;
};

// Excitation of a state that lies in a single sector. Throws InvalidArgument
// for mixed excitations and NormViolation when |eta0| differs from 1 by more than 1e-9.
int initial_excitation(const CVector& eta0, const TruncatedBasis& basis);

// Sectors k = 0..max_k at time t, which must be a multiple of step.
// Throws ExcitationOverflow when max_k exceeds the excitation of eta0.
std::vector<SectorWavefunction> sector_wavefunctions(const SystemParams& params, const TruncatedBasis& basis,
                                                     const CVector& eta0, double t, double step, int max_k,
                                                     const MultiPhotonOptions& options = {});

struct SectorNormHistory {
    double step = 0.0;
    std::vector<double> times;
    std::vector<std::vector<double>> norms;  // norms[k][i] at times[i]
    // Accumulated populations per basis state at the last time: diag[k][s] on support of sector k.
    std::vector<std::vector<double>> final_populations;
    std::vector<std::vector<std::size_t>> support;

    double total(std::size_t i) const;
};

// Sector norms for all k on every stride-th grid time up to t_max, by
// propagating the weighted outer-product sums; the numbers equal the explicit
// simplex sums of sector_wavefunctions up to rounding.
SectorNormHistory sector_norm_history(const SystemParams& params, const TruncatedBasis& basis, const CVector& eta0,
                                      double t_max, double step, std::size_t stride = 1);

// ---------------------------------------------------------------- steady output

struct OutputBranch {
    int photons = 0;
    std::size_t basis_index = 0;
    double amplitude = 0.0;    // sqrt of the branch probability
    cplx system_value = 0.0;   // photons == 0: the amplitude itself, with phase, at t_max
    std::vector<cplx> pulse;   // photons >= 1 and pulse stored: normalized, simplex-ordered
};

struct SteadyOutputState {
    double t_max = 0.0;
    double step = 0.0;
    std::size_t cells = 0;
    std::vector<OutputBranch> branches;     // every support state with an empty cavity and nonzero weight
    std::vector<double> sector_norms;
    double residual_cavity = 0.0;           // largest cavity-occupied amplitude left at t_max
    double residual_system_excitation = 0.0;  // probability that any atom is still excited

    const OutputBranch* find(int photons, std::size_t basis_index) const;
};

struct SteadyOutputOptions {
    double t_max = 40.0;
    double step = 0.01;
    int pulse_photons_max = 2;     // pulses are stored for k <= this
    double cavity_tolerance = 1e-4;
    double branch_cutoff = 1e-12;  // branches with smaller probability are omitted
    MultiPhotonOptions multiphoton;
};

// Throws NonConvergence when a cavity-occupied amplitude exceeds cavity_tolerance at t_max.
SteadyOutputState steady_output_state(const SystemParams& params, const TruncatedBasis& basis, const CVector& eta0,
                                      const SteadyOutputOptions& options = {});

// ---------------------------------------------------------------- plotting

struct SymmetricDensity {
    int photons = 0;
    std::size_t cells = 0;
    double step = 0.0;
    std::vector<double> density;  // cells^k entries, row-major in (t_1, ..., t_k)
};

// |eta|^2 summed over the support and extended to the full cube by symmetry,
// divided by k! and by the sector norm so that the cube integral is 1.
SymmetricDensity symmetrize_for_plot(const SectorWavefunction& sector);
// Same for a single normalized pulse stored in simplex order.
SymmetricDensity symmetrize_for_plot(const std::vector<cplx>& pulse, int photons, std::size_t cells, double step);

// ---------------------------------------------------------------- exponent fit

struct ExponentialFit {
    std::vector<cplx> exponents;   // s_i with y(t) ~ sum a_i exp(s_i t)
    std::vector<cplx> amplitudes;
    double relative_residual = 0.0;
};

// Matrix-pencil (generalized eigenvalue) fit of uniformly spaced samples.
ExponentialFit fit_exponentials(const std::vector<cplx>& samples, double dt, int order);

}  // namespace tavis
