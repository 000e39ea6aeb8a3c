#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dynmkw {

using Rng = std::mt19937_64;

// SplitMix64 finalizer over (seed, keys...). Used to give every replicate,
// segment or permutation its own stream, independent of scheduling order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t state = mix(seed);
    for (std::uint64_t k : keys) state = mix(state ^ mix(k));
    return state;
}

inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    return Rng(derive_seed(seed, keys));
}

}  // namespace dynmkw
