// linear_analysis.hpp — the (N+1)-dimensional passive linear model obtained
// by restricting the Tavis-Cummings dynamics to the single-excitation sector.
//
// Coordinates are (s-_1, ..., s-_N, a). The model is
//     A = -i M - (kappa/2) e e^T,   B = [0 ... 0 -sqrt(kappa)]^T,   C = -B^T
// with M real symmetric (detunings on the diagonal, couplings in the last
// row / column). Transfer function G[s] = 1 + C (sI - A)^{-1} B, T = G - 1.

#pragma once

#include "tavis/core_model.hpp"

#include <optional>
#include <span>
#include <vector>

namespace tavis {

struct LinearModel {
    CMatrix a_matrix;
    CVector b_vector;
    Eigen::RowVectorXcd c_vector;

    Eigen::Index order() const noexcept { return a_matrix.rows(); }

    // max-abs entry of [A + A^dag + C^dag C,  B + C^dag]; zero for a passive model.
    // (With C = -B^T the off-diagonal block vanishes as B + C^dag, not B - C^dag.)
    double passivity_residual() const;
};

struct TransferEval {
    cplx s;
    cplx g_value;
    cplx t_value;  // G - 1
};

LinearModel build_linear_model(const SystemParams& params);

// Resolvent evaluation. Throws SingularResolvent when sI - A is numerically singular.
TransferEval transfer_function(const LinearModel& model, cplx s);

// Rational closed form obtained by substituting the model matrices into the
// resolvent formula. Valid for any detunings; an independent route to
// transfer_function. The equal-detuning reduction is used when applicable.
cplx transfer_function_closed_form(const SystemParams& params, cplx s);

// |T[i w]|^2 for the resonant regime (all detunings and omega_r zero).
double t_magnitude_squared(const SystemParams& params, double omega);

// --- controllability / observability / stability --------------------------

struct ControllabilityResult {
    bool controllable = true;
    // Present when not controllable: x != 0 with A x = lambda x and B^dag x = 0.
    std::optional<CVector> witness;
    std::optional<cplx> eigenvalue;
};

// PBH test. Singular values below kPbhRelativeTolerance * ||A|| count as
// rank deficiency.
inline constexpr double kPbhRelativeTolerance = 1e-10;

ControllabilityResult is_controllable(const LinearModel& model);
// Dual PBH test on (A, C).
bool is_observable(const LinearModel& model);
// All eigenvalues strictly in the open left half-plane (beyond the PBH tolerance).
bool is_hurwitz(const LinearModel& model);

// --- structural decomposition ----------------------------------------------

struct FrequencyGroup {
    double frequency;                 // degenerate detuning
    std::vector<int> atoms;           // 0-based atom indices, ascending
    double effective_coupling;        // sum of Gamma^2 over the group
    int dfs_dimension;                // columns in the decoherence-free block
    bool has_bright_mode;             // false when every coupling in the group is zero
    int first_column;                 // first column of this group in the transform
};

struct Decomposition {
    Eigen::MatrixXd transform;        // orthogonal, acts on original coordinates
    CMatrix a_hat;                    // transform^T A transform
    std::vector<FrequencyGroup> groups;
    std::vector<double> effective_couplings;  // one per group
    std::vector<int> dfs_columns;     // indices of decoherence-free coordinates
    std::vector<int> co_columns;      // bright coordinates followed by the cavity
    bool zero_coupling_in_group = false;  // an orthonormal completion replaced a singular formula
};

Decomposition structural_decompose(const SystemParams& params);

// Controllable/observable block (bright coordinates + cavity) of the decomposition.
LinearModel co_subsystem(const Decomposition& decomp, const SystemParams& params);

struct DarkBrightCoordinates {
    CVector bright;  // coordinates of |B_N 0> in the transform-column basis
    CVector dark;    // coordinates of |D_N 0>, weights alpha_1..alpha_{N-1} then zeros
};

// Collective-state phases phi_k = 2 pi k / N, k = 1..N.
CVector bright_state_vector(int n_atoms);
CVector dark_state_vector(int n_atoms);

// Requires equal detunings and identical couplings (N >= 2).
DarkBrightCoordinates dark_bright_coordinates(const SystemParams& params);

}  // namespace tavis
