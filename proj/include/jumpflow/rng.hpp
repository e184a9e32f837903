#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace jumpflow {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// 64-bit avalanche finalizer (the splitmix64 output function).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Identity of one random stream: (master seed, scenario index, stream tag).
/// Streams derived from distinct ids are statistically independent, so
/// ensembles can be generated in any order, on any number of threads.
struct StreamId {
    std::uint64_t master = 0;
    std::uint64_t scenario = 0;
    std::uint64_t stream = 0;

    constexpr std::uint64_t key() const noexcept {
        std::uint64_t k = mix64(master + kGoldenGamma);
        k = mix64(k ^ (scenario + 0xD1B54A32D192ED03ULL));
        k = mix64(k ^ (stream + 0x8CB92BA72F3D8DD7ULL));
        return k;
    }
};

/// Counter-based generator: draw i of stream `id` is mix64(key(id) + i*gamma).
/// No hidden state beyond the counter; replaying a realization only needs the
/// StreamId.
class CounterRng {
public:
    explicit CounterRng(StreamId id) noexcept : key_(id.key()) {}

    std::uint64_t next_u64() noexcept { return mix64(key_ + (++counter_) * kGoldenGamma); }

    /// Uniform in [0, 1).
    double next_unit() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1] (safe argument for log()).
    double next_unit_pos() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Poisson count by exponential inter-arrival summation. Exact for any mean;
/// cost is O(mean), which is fine at the intensities used here.
inline int poisson_count(CounterRng& rng, double mean) {
    if (mean <= 0.0) return 0;
    double sum = 0.0;
    int n = -1;
    do {
        sum += -std::log(rng.next_unit_pos());
        ++n;
    } while (sum < mean);
    return n;
}

/// Index into a cumulative weight table (strictly increasing, last = total).
inline int sample_cumulative(CounterRng& rng, std::span<const double> cumulative) {
    const double u = rng.next_unit() * cumulative.back();
    int lo = 0, hi = static_cast<int>(cumulative.size()) - 1;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (u < cumulative[static_cast<std::size_t>(mid)]) hi = mid; else lo = mid + 1;
    }
    return lo;
}

} // namespace jumpflow
