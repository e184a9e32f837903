#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jumpflow {

/// Serial is the reference implementation; OpenMP must produce bit-identical
/// results because every loop body writes only to its own index and all
/// reductions run after the loop, in a thread-count-independent order.
enum class ExecutionPolicy { Serial, OpenMP };

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_thread_count(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

template <class Body>
void parallel_for(std::size_t n, ExecutionPolicy policy, Body&& body) {
    if (policy == ExecutionPolicy::OpenMP) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            body(static_cast<std::size_t>(i));
        return;
#endif
    }
    for (std::size_t i = 0; i < n; ++i) body(i);
}

/// Pairwise (tree) summation: deterministic for a fixed array regardless of
/// thread count, and more accurate than left-to-right accumulation.
inline double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

inline double pairwise_mean(std::span<const double> xs) {
    return xs.empty() ? 0.0 : pairwise_sum(xs) / static_cast<double>(xs.size());
}

struct MeanWithError {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t count = 0;
};

/// Sample mean and standard error of the mean (pairwise reductions).
inline MeanWithError mean_and_stderr(std::span<const double> xs) {
    MeanWithError r;
    r.count = xs.size();
    if (xs.empty()) return r;
    r.mean = pairwise_mean(xs);
    if (xs.size() < 2) return r;
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - r.mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(xs.size() - 1);
    r.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
    return r;
}

} // namespace jumpflow
