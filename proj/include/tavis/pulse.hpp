// pulse.hpp — sampled single-photon pulse shapes on uniform time grids.
//
// A pulse may have jump discontinuities at grid nodes (the rising exponential
// is cut off at t = 0). At such a node the stored sample is the midpoint of
// the one-sided limits, which is what a Fourier series converges to; the
// limits themselves are kept so quadrature and interpolation stay accurate.

#pragma once

#include "tavis/core_model.hpp"

#include <cstddef>
#include <vector>

namespace tavis {

struct TimeGrid {
    double t_start = 0.0;
    double dt = 1e-3;
    std::size_t n_points = 0;

    double time(std::size_t i) const { return t_start + static_cast<double>(i) * dt; }
    double t_end() const { return n_points == 0 ? t_start : time(n_points - 1); }

    // Grid covering [t0, t1] with nodes t0 + i*dt; t1 is included when it lies on the lattice.
    static TimeGrid spanning(double t0, double t1, double dt);
};

struct PulseJump {
    std::size_t node;
    cplx left;   // limit from t < t_node
    cplx right;  // limit from t > t_node
};

struct PulseShape {
    double t_start = 0.0;
    double dt = 1e-3;
    std::vector<cplx> values;
    double declared_norm = 1.0;
    std::vector<PulseJump> jumps;  // ascending node order

    std::size_t size() const noexcept { return values.size(); }
    double time(std::size_t i) const { return t_start + static_cast<double>(i) * dt; }
    double t_end() const { return values.empty() ? t_start : time(values.size() - 1); }
    TimeGrid grid() const { return {t_start, dt, values.size()}; }

    // Integral of |xi|^2 by the trapezoid rule, using one-sided limits at jumps.
    double norm() const;
    // Plain left-point sum  sum |values|^2 dt.
    double riemann_norm() const;

    // Linear interpolation between nodes, honouring jumps; zero outside the grid.
    cplx at(double t) const;

    const PulseJump* jump_at(std::size_t node) const;
};

// sqrt(gamma) exp(gamma t / 2) for t < 0, zero for t > 0; the midpoint at t = 0.
cplx rising_exponential_at(double gamma, double t);
// (Omega^2 / 2 pi)^{1/4} exp(-(Omega^2 / 4)(t - t_p)^2).
cplx gaussian_at(double omega_width, double t_peak, double t);

// Throws GridTooShort when the mass of |xi|^2 captured by the grid is below 0.999.
PulseShape rising_exponential(double gamma, const TimeGrid& grid);
PulseShape gaussian_pulse(double omega_width, double t_peak, const TimeGrid& grid);

inline constexpr double kMinimumCapturedNorm = 0.999;

}  // namespace tavis
