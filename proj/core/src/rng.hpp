#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace chsp2::detail {

// Draws are built on the mt19937_64 engine only; std:: distributions are
// avoided because their output is implementation-defined and results here
// must reproduce across standard libraries.

inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  // bound >= 1; rejection keeps the draw exactly uniform
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

inline int uniform_index(std::mt19937_64& rng, std::size_t count) {
  return static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(count)));
}

// Uniform in [0, 1), 53-bit resolution.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace chsp2::detail
