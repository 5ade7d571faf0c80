#include "tavis/errors.hpp"
#include "tavis/kernels.hpp"

#include <Eigen/LU>

#include <atomic>
#include <cmath>
#include <string>

namespace tavis::kernels {

namespace {

// One resolvent solve; flags (instead of throwing) so it is safe inside a parallel region.
cplx transfer_point(const LinearModel& m, double omega, bool& singular) {
    const auto n = m.order();
    CMatrix r = -m.a_matrix;
    r.diagonal().array() += cplx(0.0, omega);
    Eigen::PartialPivLU<CMatrix> lu(r);
    const auto diag = lu.matrixLU().diagonal().cwiseAbs();
    if (n > 0 && !(diag.minCoeff() > 1e-13 * std::max(1.0, diag.maxCoeff()))) {
        singular = true;
        return 0.0;
    }
    const CVector x = lu.solve(m.b_vector);
    return 1.0 + (m.c_vector * x)(0);
}

[[noreturn]] void throw_singular() {
    throw SingularResolvent("transfer sweep hit a pole of the transfer function on the frequency grid");
}

}  // namespace

std::vector<cplx> transfer_sweep_serial(const LinearModel& model, std::span<const double> omegas) {
    std::vector<cplx> out(omegas.size());
    bool singular = false;
    for (std::size_t i = 0; i < omegas.size(); ++i) out[i] = transfer_point(model, omegas[i], singular);
    if (singular) throw_singular();
    return out;
}

std::vector<cplx> transfer_sweep_parallel(const LinearModel& model, std::span<const double> omegas, int threads) {
    std::vector<cplx> out(omegas.size());
    std::atomic<bool> any_singular{false};
    const auto n = static_cast<long long>(omegas.size());
#pragma omp parallel for num_threads(threads) schedule(static)
    for (long long i = 0; i < n; ++i) {
        bool singular = false;
        out[static_cast<std::size_t>(i)] = transfer_point(model, omegas[static_cast<std::size_t>(i)], singular);
        if (singular) any_singular.store(true, std::memory_order_relaxed);
    }
    if (any_singular.load()) throw_singular();
    return out;
}

std::vector<cplx> transfer_sweep(const LinearModel& model, std::span<const double> omegas, int threads) {
    return threads <= 1 ? transfer_sweep_serial(model, omegas) : transfer_sweep_parallel(model, omegas, threads);
}

}  // namespace tavis::kernels
