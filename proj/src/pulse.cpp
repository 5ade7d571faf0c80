#include "tavis/pulse.hpp"

#include "tavis/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tavis {

TimeGrid TimeGrid::spanning(double t0, double t1, double dt) {
    if (!(dt > 0.0) || !(t1 >= t0)) throw InvalidArgument("TimeGrid::spanning needs dt > 0 and t1 >= t0");
    const auto steps = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9));
    return {t0, dt, steps + 1};
}

const PulseJump* PulseShape::jump_at(std::size_t node) const {
    for (const auto& j : jumps)
        if (j.node == node) return &j;
    return nullptr;
}

double PulseShape::norm() const {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        cplx a = values[i];
        cplx b = values[i + 1];
        if (const auto* j = jump_at(i)) a = j->right;
        if (const auto* j = jump_at(i + 1)) b = j->left;
        acc += 0.5 * (std::norm(a) + std::norm(b));
    }
    return acc * dt;
}

double PulseShape::riemann_norm() const {
    double acc = 0.0;
    for (const auto& v : values) acc += std::norm(v);
    return acc * dt;
}

cplx PulseShape::at(double t) const {
    if (values.empty()) return 0.0;
    const double x = (t - t_start) / dt;
    if (x < 0.0 || x > static_cast<double>(values.size() - 1)) return 0.0;
    auto i = static_cast<std::size_t>(std::floor(x));
    if (i + 1 >= values.size()) {
        const auto* j = jump_at(values.size() - 1);
        return j ? j->left : values.back();
    }
    const double frac = x - static_cast<double>(i);
    cplx a = values[i];
    cplx b = values[i + 1];
    if (const auto* j = jump_at(i)) a = (frac == 0.0) ? values[i] : j->right;
    if (const auto* j = jump_at(i + 1)) b = j->left;
    return a + frac * (b - a);
}

cplx rising_exponential_at(double gamma, double t) {
    if (t < 0.0) return std::sqrt(gamma) * std::exp(0.5 * gamma * t);
    if (t == 0.0) return 0.5 * std::sqrt(gamma);
    return 0.0;
}

cplx gaussian_at(double omega_width, double t_peak, double t) {
    const double amp = std::pow(omega_width * omega_width / (2.0 * std::numbers::pi), 0.25);
    const double d = t - t_peak;
    return amp * std::exp(-0.25 * omega_width * omega_width * d * d);
}

PulseShape rising_exponential(double gamma, const TimeGrid& grid) {
    if (!(gamma > 0.0)) throw InvalidArgument("rising_exponential: gamma must be positive");
    if (grid.n_points < 2 || !(grid.dt > 0.0)) throw InvalidArgument("rising_exponential: grid needs >= 2 points");
    // Exact mass of |xi|^2 on [t_start, min(t_end, 0)].
    const double hi = std::min(grid.t_end(), 0.0);
    const double captured = hi > grid.t_start ? std::exp(gamma * hi) - std::exp(gamma * grid.t_start) : 0.0;
    if (captured < kMinimumCapturedNorm)
        throw GridTooShort("rising_exponential: grid captures only " + std::to_string(captured) +
                           " of the pulse norm");
    PulseShape p;
    p.t_start = grid.t_start;
    p.dt = grid.dt;
    p.values.resize(grid.n_points);
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        const double t = grid.time(i);
        // Snap the node nearest t = 0 so the cutoff sits exactly on it.
        if (std::abs(t) < 1e-9 * grid.dt) {
            p.values[i] = 0.5 * std::sqrt(gamma);
            p.jumps.push_back({i, std::sqrt(gamma), 0.0});
        } else {
            p.values[i] = rising_exponential_at(gamma, t);
        }
    }
    return p;
}

PulseShape gaussian_pulse(double omega_width, double t_peak, const TimeGrid& grid) {
    if (!(omega_width > 0.0)) throw InvalidArgument("gaussian_pulse: width must be positive");
    if (grid.n_points < 2 || !(grid.dt > 0.0)) throw InvalidArgument("gaussian_pulse: grid needs >= 2 points");
    // |xi|^2 is a normal density with standard deviation 1/Omega.
    const double s = omega_width / std::numbers::sqrt2;
    const double captured =
        0.5 * (std::erf(s * (grid.t_end() - t_peak)) - std::erf(s * (grid.t_start - t_peak)));
    if (captured < kMinimumCapturedNorm)
        throw GridTooShort("gaussian_pulse: grid captures only " + std::to_string(captured) + " of the pulse norm");
    PulseShape p;
    p.t_start = grid.t_start;
    p.dt = grid.dt;
    p.values.resize(grid.n_points);
    for (std::size_t i = 0; i < grid.n_points; ++i) p.values[i] = gaussian_at(omega_width, t_peak, grid.time(i));
    return p;
}

}  // namespace tavis
