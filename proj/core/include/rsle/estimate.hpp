#pragma once

/// Monte Carlo reduction helpers. All reductions are pairwise over a fixed
/// index order, so results do not depend on the number of workers.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>
#include <cmath>
#include <thread>
#include <functional>

namespace rsle {

struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;  // sample standard deviation / sqrt(n)
    std::size_t n = 0;
};

/// Pairwise (cascade) sum; deterministic for a fixed element order.
inline double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline Estimate estimate_from_samples(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("estimate over empty sample set");
    Estimate e;
    e.n = v.size();
    e.mean = pairwise_sum(v) / static_cast<double>(e.n);
    if (e.n > 1) {
        std::vector<double> sq(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double d = v[i] - e.mean;
            sq[i] = d * d;
        }
        const double var = pairwise_sum(sq) / static_cast<double>(e.n - 1);
        e.stderr_ = std::sqrt(var / static_cast<double>(e.n));
    }
    return e;
}

/// Run body(i) for i in [0, n) over `workers` threads, partitioned in
/// contiguous index ranges. The body must only write to slots owned by i.
inline void parallel_for_indexed(std::size_t n, unsigned workers,
                                 const std::function<void(std::size_t)>& body) {
    if (workers <= 1 || n < 2 * workers) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace rsle
