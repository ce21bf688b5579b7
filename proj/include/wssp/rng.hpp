#pragma once

// Seeded randomness. Every trial, round and run draws from its own substream
// derived from a master seed, so results do not depend on scheduling.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace wssp {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Child seed for substream `index` of `master`. Stable across platforms and
/// releases; changing it changes every published output.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(mix64(master) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = master;
    for (auto p : path) s = derive_seed(s, p);
    return s;
}

/// Uniform double in [0,1) from the top 53 bits; identical on every standard
/// library, unlike std::uniform_real_distribution.
template <class Urbg>
double uniform01(Urbg& rng) {
    static_assert(Urbg::max() == ~std::uint64_t{0} && Urbg::min() == 0, "needs a full 64-bit generator");
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Unbiased integer in [0, bound) by rejection.
template <class Urbg>
std::uint64_t uniform_index(Urbg& rng, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

}  // namespace wssp
