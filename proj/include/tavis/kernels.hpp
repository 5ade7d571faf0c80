// kernels.hpp — data-parallel inner loops, each in a serial reference form
// and an OpenMP form. Both forms run the same per-element arithmetic in the
// same order, so their outputs are bitwise identical; the serial one is what
// tests and single-threaded CLI runs use.

#pragma once

#include "tavis/linear_analysis.hpp"
#include "tavis/multiphoton.hpp"

#include <span>
#include <vector>

namespace tavis::kernels {

// G[i w] for every w. Throws SingularResolvent if any point is singular.
std::vector<cplx> transfer_sweep_serial(const LinearModel& model, std::span<const double> omegas);
std::vector<cplx> transfer_sweep_parallel(const LinearModel& model, std::span<const double> omegas,
                                          int threads);

// Dispatches to the serial kernel when threads <= 1.
std::vector<cplx> transfer_sweep(const LinearModel& model, std::span<const double> omegas, int threads);

// Inputs of the simplex walks for k emissions at the midpoints of n cells:
//   value(i_1..i_k) = P[n - 1 - i_k] L S^{i_k - i_{k-1}} L ... L E[i_1]
// where E[i] = S_top^i H_top eta0, P[m] = S_{top-k}^m H_{top-k} and H is the half step.
struct SimplexChains {
    const SectorBlocks* blocks = nullptr;
    int photons = 1;
    std::size_t cells = 0;
    std::vector<CVector> no_emission;   // E[i], i = 0..cells - 1, on sector top
    std::vector<CMatrix> final_powers;  // P[m], m = 0..cells - 1, on sector top - photons

    static SimplexChains prepare(const SectorBlocks& blocks, const CVector& eta_top, int photons,
                                 std::size_t cells);
};

// Node values, node-major with dim(top - k) entries per node, in SimplexIndex order.
std::vector<cplx> simplex_values_serial(const SimplexChains& chains);
std::vector<cplx> simplex_values_parallel(const SimplexChains& chains, int threads);
std::vector<cplx> simplex_values(const SimplexChains& chains, int threads);

// Weighted sum of |value|^2 without storing the nodes. Partial sums are kept
// per first index and added in index order, so the result does not depend on
// the thread count.
double simplex_norm_serial(const SimplexChains& chains);
double simplex_norm_parallel(const SimplexChains& chains, int threads);
double simplex_norm(const SimplexChains& chains, int threads);

}  // namespace tavis::kernels
