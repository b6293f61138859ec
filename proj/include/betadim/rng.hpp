#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace betadim {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream from a base seed and a path of indices
// (level, parent, ...), so results do not depend on scheduling.
inline Rng make_rng(std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t v : path) h = splitmix64(h ^ splitmix64(v));
  return Rng(h);
}

// Uniform in [0, 1) with 53 random bits.
inline double unit_real(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

}  // namespace betadim
