#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace readc {

// Seeded generator used everywhere a draw happens. Distribution math is
// implemented here rather than through std:: distributions so that two runs
// with the same seed produce identical streams regardless of libstdc++
// internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // Rejection sampling keeps the draw unbiased.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Standard normal via Box-Muller; one value per call, no cached spare.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // k distinct indices drawn uniformly from [0, n), ascending order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        std::vector<std::size_t> picked;
        if (k >= n) {
            picked.resize(n);
            for (std::size_t i = 0; i < n; ++i) picked[i] = i;
            return picked;
        }
        picked.reserve(k);
        // Floyd's algorithm over a sorted insert keeps draws O(k log k).
        std::vector<std::size_t> chosen;
        for (std::size_t j = n - k; j < n; ++j) {
            std::size_t t = uniform_index(j + 1);
            bool seen = false;
            for (std::size_t c : chosen) {
                if (c == t) { seen = true; break; }
            }
            chosen.push_back(seen ? j : t);
        }
        picked = chosen;
        std::sort(picked.begin(), picked.end());
        return picked;
    }

    Rng split(std::uint64_t stream) {
        // Derive an independent stream; mixing constant from splitmix64.
        return Rng(engine_() ^ (stream * 0x9E3779B97F4A7C15ull));
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace readc
