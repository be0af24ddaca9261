#pragma once

#include <cstdint>
#include <random>

namespace gcf {

/// splitmix64 finalizer; used to derive independent per-component seeds
/// from one global seed. The fan-out rule is: child = mix(parent ^ tag),
/// applied once per tag level (documented in the README config section).
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
    return mix_seed(parent ^ mix_seed(tag));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

}  // namespace gcf
