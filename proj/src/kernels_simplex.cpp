// kernels_simplex.cpp — forward accumulation over the ordered emission-time
// simplex. Each first emission index starts an independent depth-first chain
// that reuses its prefix product at every deeper level.

#include "tavis/errors.hpp"
#include "tavis/kernels.hpp"

#include <omp.h>

#include <string>

namespace tavis::kernels {

namespace {

// Per-thread scratch and the recursive walk. Buffers are allocated once per
// level so the inner loop does no heap work.
class Walker {
public:
    explicit Walker(const SimplexChains& c) : c_(c), top_(c.blocks->top), k_(c.photons) {
        post_.resize(static_cast<std::size_t>(k_) + 1);
        evolve_.resize(post_.size());
        scratch_.resize(post_.size());
        for (int l = 1; l <= k_; ++l) {
            const auto d = static_cast<Eigen::Index>(c.blocks->dim(top_ - l));
            post_[l].resize(d);
            evolve_[l].resize(d);
            scratch_[l].resize(d);
        }
        final_.resize(static_cast<Eigen::Index>(c.blocks->dim(top_ - k_)));
    }

    template <class Sink>
    void run(std::size_t first, Sink& sink) {
        post_[1].noalias() = c_.blocks->jump[static_cast<std::size_t>(top_)] * c_.no_emission[first];
        descend(1, first, 1, c_.blocks->step, sink);
    }

private:
    template <class Sink>
    void descend(int level, std::size_t last, int run, double weight, Sink& sink) {
        if (level == k_) {
            final_.noalias() = c_.final_powers[c_.cells - 1 - last] * post_[level];
            sink(final_, weight);
            return;
        }
        const auto sector = static_cast<std::size_t>(top_ - level);
        const CMatrix& s = c_.blocks->propagator[sector];
        const CMatrix& l = c_.blocks->jump[sector];
        CVector& w = evolve_[level];
        CVector& tmp = scratch_[level];
        w = post_[level];
        for (std::size_t i = last; i < c_.cells; ++i) {
            if (i > last) {
                tmp.noalias() = s * w;
                w.swap(tmp);
            }
            post_[level + 1].noalias() = l * w;
            const int r = (i == last) ? run + 1 : 1;
            descend(level + 1, i, r, weight * c_.blocks->step / r, sink);
        }
    }

    const SimplexChains& c_;
    int top_;
    int k_;
    std::vector<CVector> post_, evolve_, scratch_;
    CVector final_;
};

void check_chains(const SimplexChains& c) {
    if (c.blocks == nullptr || c.photons < 1 || c.photons > c.blocks->top)
        throw InvalidArgument("simplex kernel: photon count must lie in 1..top");
    if (c.no_emission.size() != c.cells || c.final_powers.size() != c.cells)
        throw DimensionMismatch("simplex kernel: chains were prepared for a different grid");
}

struct ValueSink {
    cplx* out;
    void operator()(const CVector& v, double) {
        for (Eigen::Index j = 0; j < v.size(); ++j) *out++ = v(j);
    }
};

struct NormSink {
    double acc = 0.0;
    void operator()(const CVector& v, double w) { acc += w * v.squaredNorm(); }
};

std::vector<cplx> allocate_values(const SimplexChains& c, const SimplexIndex& idx) {
    return std::vector<cplx>(idx.size() * c.blocks->dim(c.blocks->top - c.photons));
}

}  // namespace

SimplexChains SimplexChains::prepare(const SectorBlocks& blocks, const CVector& eta_top, int photons,
                                     std::size_t cells) {
    if (photons < 1 || photons > blocks.top)
        throw InvalidArgument("SimplexChains: photon count must lie in 1.." + std::to_string(blocks.top));
    if (static_cast<std::size_t>(eta_top.size()) != blocks.dim(blocks.top))
        throw DimensionMismatch("SimplexChains: initial vector does not match the top sector");
    SimplexChains c;
    c.blocks = &blocks;
    c.photons = photons;
    c.cells = cells;
    const CMatrix& s_top = blocks.propagator[static_cast<std::size_t>(blocks.top)];
    c.no_emission.reserve(cells);
    CVector e = blocks.half_propagator[static_cast<std::size_t>(blocks.top)] * eta_top;
    for (std::size_t i = 0; i < cells; ++i) {
        c.no_emission.push_back(e);
        e = s_top * e;
    }
    const CMatrix& s_fin = blocks.propagator[static_cast<std::size_t>(blocks.top - photons)];
    c.final_powers.reserve(cells);
    CMatrix p = blocks.half_propagator[static_cast<std::size_t>(blocks.top - photons)];
    for (std::size_t m = 0; m < cells; ++m) {
        c.final_powers.push_back(p);
        p = s_fin * p;
    }
    return c;
}

std::vector<cplx> simplex_values_serial(const SimplexChains& chains) {
    check_chains(chains);
    const SimplexIndex idx(chains.photons, chains.cells);
    std::vector<cplx> out = allocate_values(chains, idx);
    Walker walker(chains);
    ValueSink sink{out.data()};
    for (std::size_t first = 0; first < chains.cells; ++first) walker.run(first, sink);
    return out;
}

std::vector<cplx> simplex_values_parallel(const SimplexChains& chains, int threads) {
    check_chains(chains);
    const SimplexIndex idx(chains.photons, chains.cells);
    std::vector<cplx> out = allocate_values(chains, idx);
    const std::size_t d = chains.blocks->dim(chains.blocks->top - chains.photons);
    const auto n = static_cast<long long>(chains.cells);
#pragma omp parallel num_threads(threads)
    {
        Walker walker(chains);
#pragma omp for schedule(dynamic)
        for (long long first = 0; first < n; ++first) {
            const auto f = static_cast<std::size_t>(first);
            ValueSink sink{out.data() + idx.block_offset(f) * d};
            walker.run(f, sink);
        }
    }
    return out;
}

std::vector<cplx> simplex_values(const SimplexChains& chains, int threads) {
    return threads <= 1 ? simplex_values_serial(chains) : simplex_values_parallel(chains, threads);
}

double simplex_norm_serial(const SimplexChains& chains) {
    check_chains(chains);
    Walker walker(chains);
    double total = 0.0;
    for (std::size_t first = 0; first < chains.cells; ++first) {
        NormSink sink;
        walker.run(first, sink);
        total += sink.acc;
    }
    return total;
}

double simplex_norm_parallel(const SimplexChains& chains, int threads) {
    check_chains(chains);
    std::vector<double> partial(chains.cells, 0.0);
    const auto n = static_cast<long long>(chains.cells);
#pragma omp parallel num_threads(threads)
    {
        Walker walker(chains);
#pragma omp for schedule(dynamic)
        for (long long first = 0; first < n; ++first) {
            NormSink sink;
            walker.run(static_cast<std::size_t>(first), sink);
            partial[static_cast<std::size_t>(first)] = sink.acc;
        }
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

double simplex_norm(const SimplexChains& chains, int threads) {
    return threads <= 1 ? simplex_norm_serial(chains) : simplex_norm_parallel(chains, threads);
}

}  // namespace tavis::kernels
