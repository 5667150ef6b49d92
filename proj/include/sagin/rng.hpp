#pragma once

#include <cstdint>
#include <random>

// Seeded randomness helpers. Every random draw in the project goes through
// std::mt19937_64 plus the mappings below, so runs are bit-reproducible
// across platforms (the engine and these mappings are fully specified;
// std::uniform_*_distribution is not, hence the hand-rolled conversions).

namespace sagin::rng {

using Engine = std::mt19937_64;

// splitmix64 step, used to derive independent sub-seeds from one base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Sub-seed for stream `stream` of base seed `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_double(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(Engine& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform_double(eng);
}

// Uniform index in [0, n) via rejection sampling (no modulo bias).
inline std::size_t uniform_index(Engine& eng, std::size_t n) {
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x = eng();
    while (x >= limit) x = eng();
    return static_cast<std::size_t>(x % span);
}

}  // namespace sagin::rng
