#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

// Pinned random number generation.
//
// Every randomized component of the toolkit (graph generation, iterate
// initialization, minibatch shuffling, probe sampling) draws from a
// std::mt19937_64 through the explicit mappings below, never through
// std::uniform_*/std::normal_distribution (whose output is not specified
// bit-for-bit by the standard). This keeps output streams reproducible
// across standard libraries and reimplementable in other languages:
//
//   uniform01:     (x >> 11) * 2^-53                 in [0, 1)
//   uniform01_open ((x >> 11) + 1) * 2^-53           in (0, 1]
//   normal_pair:   Box-Muller on two uniform01_open draws
//   uniform_below: rejection sampling on the high bits
//   shuffle:       Fisher-Yates using uniform_below
//
// Sub-streams are derived with splitmix64 so that, e.g., each agent's
// minibatch stream is independent of the agent count.

namespace cgt::rng {

using Engine = std::mt19937_64;

inline Engine make(std::uint64_t seed) { return Engine(seed); }

/// splitmix64 finalizer; mixes a base seed with a stream tag.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline double uniform01(Engine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform01_open(Engine& rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

/// Two independent standard normals (Box-Muller).
inline std::array<double, 2> normal_pair(Engine& rng) {
    const double u1 = uniform01_open(rng);
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    return {r * std::cos(t), r * std::sin(t)};
}

/// Uniform integer in [0, n); n > 0. Unbiased via rejection.
inline std::uint64_t uniform_below(Engine& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

/// In-place Fisher-Yates shuffle with the pinned integer mapping.
template <typename T>
void shuffle(Engine& rng, std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace cgt::rng
