// master_equation.hpp — density-matrix dynamics under vacuum input and under
// a single-photon input (the four-component Fock-state hierarchy).
//
//   L* rho = -i[H, rho] + L rho L^dag - 1/2 L^dag L rho - 1/2 rho L^dag L
//
// Hierarchy, with rho^{jk} started from |zeta><zeta| (jk = 11, 00) or 0:
//   d rho11 = L* rho11 + xi [rho01, L^dag] + xi^* [L, rho10]
//   d rho10 = L* rho10 + xi [rho00, L^dag]
//   d rho01 = L* rho01 + xi^* [L, rho00]
//   d rho00 = L* rho00
//
// Integration is fixed-step classical RK4. Every trajectory is rerun at half
// the step and StepTooLarge is thrown when any population moves by more than
// kStepHalvingTolerance.

#pragma once

#include "tavis/core_model.hpp"
#include "tavis/pulse.hpp"

#include <cstddef>
#include <vector>

namespace tavis {

using DensityMatrix = CMatrix;

struct DensityDiagnostics {
    double hermiticity_error;  // max |rho - rho^dag|
    double trace_error;        // |tr rho - 1|
    double min_eigenvalue;
};
DensityDiagnostics inspect_density(const DensityMatrix& rho);

struct FockHierarchy {
    double t = 0.0;
    DensityMatrix rho11, rho10, rho01, rho00;

    static FockHierarchy initial(const CVector& zeta);
};

// Throws DimensionMismatch when the shapes disagree.
DensityMatrix lindblad_rhs(const DensityMatrix& rho, const CMatrix& h, const CMatrix& l);

inline constexpr double kStepHalvingTolerance = 1e-5;

struct IntegrationOptions {
    double t_start = 0.0;
    double t_end = 1.0;
    double dt = 0.005;
    std::size_t sample_stride = 1;    // keep every n-th step (the endpoints are always kept)
    bool check_step_halving = true;
};

struct VacuumTrajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    double halving_error = 0.0;  // max population change when dt is halved
};

struct FockTrajectory {
    std::vector<double> times;
    std::vector<FockHierarchy> states;
    double halving_error = 0.0;
};

VacuumTrajectory integrate_vacuum_master(const CMatrix& h, const CMatrix& l, const DensityMatrix& rho0,
                                         const IntegrationOptions& options);
VacuumTrajectory integrate_vacuum_master(const SystemParams& params, const TruncatedBasis& basis,
                                         const DensityMatrix& rho0, const IntegrationOptions& options);

// xi is linearly interpolated between its samples and taken as zero outside its grid.
FockTrajectory integrate_fock_master(const CMatrix& h, const CMatrix& l, const PulseShape& xi,
                                     const DensityMatrix& rho0, const IntegrationOptions& options);
FockTrajectory integrate_fock_master(const SystemParams& params, const TruncatedBasis& basis, const PulseShape& xi,
                                     const DensityMatrix& rho0, const IntegrationOptions& options);

// 2x2 reduced state of atom 1 in the ordering {e, g}.
CMatrix reduce_to_atom1(const DensityMatrix& rho, const TruncatedBasis& basis);
// Excitation probability of a single atom (0-based), traced over everything else.
double atom_excitation(const DensityMatrix& rho, const TruncatedBasis& basis, int atom);

struct SteadyStateOptions {
    double dt = 0.0;               // 0 selects 0.005 / kappa
    double residual_tolerance = 1e-10;
    double t_max = 0.0;            // 0 selects 200 / kappa
    double check_interval = 0.0;   // 0 selects 1 / kappa
};

struct SteadyStateResult {
    DensityMatrix rho;
    double t = 0.0;          // integration time needed
    double residual = 0.0;   // max |L* rho|
};

// Vacuum-input steady state by integrating until the generator residual is
// below tolerance. Throws NonConvergence past t_max.
SteadyStateResult steady_state(const SystemParams& params, const TruncatedBasis& basis, const DensityMatrix& rho0,
                               const SteadyStateOptions& options = {});
SteadyStateResult steady_state(const CMatrix& h, const CMatrix& l, const DensityMatrix& rho0,
                               const SteadyStateOptions& options);

}  // namespace tavis
