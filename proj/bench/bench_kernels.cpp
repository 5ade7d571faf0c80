// bench_kernels.cpp — serial reference kernels against their OpenMP forms.
//
// The thread count is the benchmark argument; 0 selects the serial kernel.

#include "tavis/kernels.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

namespace {

using namespace tavis;

std::vector<double> frequency_grid(double half_width, double d_omega) {
    std::vector<double> w;
    const auto n = static_cast<std::size_t>(std::llround(2.0 * half_width / d_omega));
    w.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) w.push_back(-half_width + static_cast<double>(i) * d_omega);
    return w;
}

void BM_TransferSweep(benchmark::State& state) {
    // Distinct detunings keep every mode coupled, so the full model has no
    // pole on the real frequency axis.
    auto params = SystemParams::uniform(8, 0.0, 0.0, 1.0, 1.0);
    for (int j = 0; j < 8; ++j) params.omega[static_cast<std::size_t>(j)] = 0.37 * j - 1.3;
    const auto model = build_linear_model(params);
    const auto omegas = frequency_grid(15.0, 1e-3);
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto g = threads == 0 ? kernels::transfer_sweep_serial(model, omegas)
                              : kernels::transfer_sweep_parallel(model, omegas, threads);
        benchmark::DoNotOptimize(g.data());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * omegas.size()));
}

struct SimplexSetup {
    TruncatedBasis basis{3, 3};
    SectorBlocks blocks;
    CVector eta_top;

    explicit SimplexSetup(double step) {
        const auto params = SystemParams::uniform(3, 0.0, 0.0, 1.0, 1.0);
        blocks = SectorBlocks::build(build_effective_hamiltonian(params, basis).matrix(),
                                     build_coupling(params, basis).matrix(), basis, 3, step);
        const CVector eta0 = basis_ket(basis, "eee0");
        const std::vector<Eigen::Index> idx(blocks.index[3].begin(), blocks.index[3].end());
        eta_top = eta0(idx);
    }
};

void BM_SimplexValues(benchmark::State& state) {
    const SimplexSetup s(0.1);
    const auto chains = kernels::SimplexChains::prepare(s.blocks, s.eta_top, 2, 250);
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto v = threads == 0 ? kernels::simplex_values_serial(chains)
                              : kernels::simplex_values_parallel(chains, threads);
        benchmark::DoNotOptimize(v.data());
    }
}

void BM_SimplexNorm(benchmark::State& state) {
    const SimplexSetup s(0.5);
    const auto chains = kernels::SimplexChains::prepare(s.blocks, s.eta_top, 3, 80);
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        double n = threads == 0 ? kernels::simplex_norm_serial(chains)
                                : kernels::simplex_norm_parallel(chains, threads);
        benchmark::DoNotOptimize(n);
    }
}

}  // namespace

BENCHMARK(BM_TransferSweep)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimplexValues)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimplexNorm)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
