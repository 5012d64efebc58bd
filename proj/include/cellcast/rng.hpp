#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace cellcast {

// Deterministic random source. All draws go through the helpers below so
// that streams are identical across standard-library implementations
// (std::uniform_int_distribution and friends are not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [lo, hi], inclusive. Unbiased (rejection).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t n = static_cast<std::uint64_t>(hi - lo) + 1;
        if (n == 0) return static_cast<std::int64_t>(engine_());
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - max % n;
        std::uint64_t r = engine_();
        while (r >= limit) r = engine_();
        return lo + static_cast<std::int64_t>(r % n);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal, Box-Muller. Two draws per call, no cached spare.
    double normal() {
        constexpr double two_pi = 6.283185307179586476925286766559;
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    // k distinct members of {0,...,n-1} via partial Fisher-Yates, draw order.
    std::vector<int> sample_indices(int n, int k) {
        std::vector<int> pool(static_cast<std::size_t>(n));
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < k; ++i) {
            const auto j = uniform_int(i, n - 1);
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        pool.resize(static_cast<std::size_t>(k));
        return pool;
    }

private:
    std::mt19937_64 engine_;
};

// splitmix64 finalizer; derives independent sub-seeds (per-cell training
// runs, gap insertion, data generation) from one master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace cellcast
