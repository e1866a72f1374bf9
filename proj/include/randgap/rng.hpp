#pragma once

#include <cstdint>
#include <random>

namespace randgap {

/// All randomness in the library flows through explicitly seeded engines.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer, used to decorrelate derived seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Per-instance stream: campaign seed XOR hash of the instance index, so any
/// subset of instances can be reproduced independently of the others.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return seed ^ splitmix64(index);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

} // namespace randgap
