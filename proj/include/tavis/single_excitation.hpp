// single_excitation.hpp — one excitation shared between the atoms, the cavity
// and the output field.
//
//  * single_photon_response: the output pulse for a single-photon input with
//    the system starting in |g...g 0>, via eta[i w] = G[i w] xi[i w].
//  * analytic_single_excitation_state: closed-form joint state when atom k
//    starts excited and all atomic detunings coincide.
//  * superposition_evolution: the same for a superradiant/subradiant mixture.

#pragma once

#include "tavis/linear_analysis.hpp"
#include "tavis/pulse.hpp"

#include <optional>

namespace tavis {

struct ResponseOptions {
    int padding_factor = 4;  // zero padding against circular wraparound
    int threads = 1;
};

// Output pulse on the grid of xi. Degenerate (uncontrollable) models are
// evaluated through their controllable/observable block, which has the same
// transfer function and no poles on the imaginary axis.
PulseShape single_photon_response(const SystemParams& params, const PulseShape& xi,
                                  const ResponseOptions& options = {});

struct SingleExcitationState {
    double t = 0.0;
    std::vector<cplx> c;   // atomic amplitudes, c[k] for the initially excited atom
    cplx c_cavity = 0.0;   // |g...g 1>
    cplx c_field = 0.0;    // prefactor of the emitted-photon component
    PulseShape phi;        // phi(tau) on [0, t]; empty unless sampling was requested
    double phi_norm = 0.0; // integral of |phi|^2 over [0, t]
    bool moduli_only = false;  // steady values for omega_s != 0 carry moduli, not phases

    double total_probability() const;
};

struct AnalyticOptions {
    // Sample phi on [0, t] with about this step (0 disables sampling).
    double phi_dt = 0.0;
    // Evaluate with the non-principal square root for chi; results must not change.
    bool negate_chi = false;
};

// k is the 0-based index of the initially excited atom.
SingleExcitationState analytic_single_excitation_state(const SystemParams& params, int k, double t,
                                                       const AnalyticOptions& options = {});

// t = infinity. Exact amplitudes for omega_s = 0; moduli only otherwise.
SingleExcitationState steady_single_excitation_state(const SystemParams& params, int k);

// The emitted field amplitude c_field * phi(tau) for atom k, evaluated at (tau, t).
cplx single_excitation_field(const SystemParams& params, int k, double tau, double t);

struct SuperpositionState {
    double t = 0.0;
    std::vector<cplx> atoms;
    cplx cavity = 0.0;
    double field_norm = 0.0;  // probability that the photon has left
    PulseShape field;         // total emitted amplitude, sampled when requested
};

// (alpha |B_N> + beta |D_N>) |0> evolved to time t. Throws NormViolation when
// |alpha|^2 + |beta|^2 differs from 1 by more than 1e-9.
SuperpositionState superposition_evolution(cplx alpha, cplx beta, const SystemParams& params, double t,
                                           double field_dt = 0.0);

}  // namespace tavis
