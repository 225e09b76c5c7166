#pragma once

#include <cstdint>
#include <random>

namespace stq {

// splitmix64: fast, platform-stable mixer. Used for edge ranks and seed
// derivation so that results are reproducible across standard libraries
// (std::hash makes no such promise).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return hash_combine(seed, stream);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

}  // namespace stq
