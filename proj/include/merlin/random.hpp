#pragma once

#include <cstdint>
#include <random>

namespace merlin {

using Rng = std::mt19937_64;

/// SplitMix64 avalanche step. Fixed across the library so that derived seeds
/// (restart streams, sweep cells) are reproducible.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ b);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

}  // namespace merlin
