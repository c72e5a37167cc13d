#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace treebo {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform double in [0, 1). Scaling is done by hand so that streams do not
/// depend on the standard library's distribution implementations.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Unbiased integer in [0, n) via rejection sampling.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % n;
}

/// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
inline std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}

/// One point drawn uniformly from a box; the shared init stream for campaigns
/// and random search draws through here so their sequences line up.
inline std::vector<double> sample_uniform_point(Rng& rng, std::span<const double> lower,
                                                std::span<const double> upper) {
    std::vector<double> x(lower.size());
    for (std::size_t i = 0; i < lower.size(); ++i) x[i] = uniform_in(rng, lower[i], upper[i]);
    return x;
}

}  // namespace treebo
