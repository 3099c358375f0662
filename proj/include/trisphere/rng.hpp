#pragma once

#include <cstdint>

namespace trisphere {

// Counter-based generator used for every randomized family in the project.
// A draw is a pure function of (seed, counter), so any run -- or any
// reimplementation following this recipe -- reproduces the same values:
//   state  = seed XOR splitmix64(counter + 0x9E3779B97F4A7C15)
//   output = splitmix64(state)
//   u01    = (output >> 11) * 2^-53
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter) {
    return splitmix64(seed ^ splitmix64(counter + 0x9E3779B97F4A7C15ULL));
}

/// Uniform draw in [0, 1) addressed by (seed, counter).
inline double counter_u01(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(counter_hash(seed, counter) >> 11) * 0x1.0p-53;
}

/// Uniform draw in [lo, hi).
inline double counter_uniform(std::uint64_t seed, std::uint64_t counter,
                              double lo, double hi) {
    return lo + (hi - lo) * counter_u01(seed, counter);
}

} // namespace trisphere
