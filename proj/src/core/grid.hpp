#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

#include "types.hpp"

namespace qsm {

/// 1-D quadrature nodes and weights on [-limit, limit]. Nodes are built
/// from mirrored halves so the set is exactly symmetric before any shift
/// is applied.
struct Axis {
    std::vector<double> x;
    std::vector<double> w;
};

Axis make_axis(double limit, int nodes, GridRule rule, double shift = 0.0);

/// Pairwise (tree) reduction of f(i) over [0, n) with a fixed traversal
/// order, independent of the caller's thread count.
template <typename T, typename F>
T pairwise_sum(long long lo, long long hi, F&& f) {
    if (hi - lo <= 32) {
        T s{};
        for (long long i = lo; i < hi; ++i) s += f(i);
        return s;
    }
    const long long mid = lo + (hi - lo) / 2;
    return pairwise_sum<T>(lo, mid, f) + pairwise_sum<T>(mid, hi, f);
}

/// Evaluates block_fn(b) for b in [0, n_blocks) on the worker pool and
/// combines the per-block values in block order. Worker count comes from
/// the QSM_THREADS environment variable (default: hardware concurrency);
/// results do not depend on it.
int worker_count();

template <typename T, typename F>
T reduce_blocks(long long n_blocks, F&& block_fn) {
    std::vector<T> partial(static_cast<size_t>(n_blocks));
    const int workers = std::min<long long>(worker_count(), n_blocks);
    if (workers <= 1) {
        for (long long b = 0; b < n_blocks; ++b) partial[b] = block_fn(b);
    } else {
        std::vector<std::thread> pool;
        std::atomic<long long> next{0};
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (long long b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1))
                    partial[b] = block_fn(b);
            });
        for (auto& th : pool) th.join();
    }
    return pairwise_sum<T>(0, n_blocks, [&](long long b) { return partial[b]; });
}

}  // namespace qsm
