#pragma once

#include <cstdint>
#include <random>

namespace hsf {

using Rng = std::mt19937_64;

// Per-run seeds spread from one base seed, splitmix64-style, so run k is
// the same stream no matter which worker executes it or in what order.
inline uint64_t derive_seed(uint64_t base, uint64_t index) {
  uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Unbiased draw from [0, n) by rejection; avoids the library-specific
// behaviour of std::uniform_int_distribution so identical seeds give
// identical runs on any standard library.
inline uint32_t uniform_below(Rng& rng, uint32_t n) {
  const uint64_t span = n;
  const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return static_cast<uint32_t>(draw % span);
}

}  // namespace hsf
