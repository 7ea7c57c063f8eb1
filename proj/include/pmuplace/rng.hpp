#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace pmuplace::rng {

// Counter-based generator: every draw is a pure function of (key, counter),
// so trial partitioning across workers cannot change the stream.
inline constexpr const char* kAlgorithm = "splitmix64-counter+box-muller";

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform in [0, 1), 53-bit resolution.
inline double uniform(std::uint64_t key, std::uint64_t counter) {
    return static_cast<double>(splitmix64(key ^ splitmix64(counter)) >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller; one draw per counter.
inline double gaussian(std::uint64_t key, std::uint64_t counter) {
    const double u1 = 1.0 - uniform(key, 2 * counter);      // (0, 1], log-safe
    const double u2 = uniform(key, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace pmuplace::rng
