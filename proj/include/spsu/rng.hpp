#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace spsu {

// Sampling helpers on top of std::mt19937_64. The standard <random>
// distributions are implementation-defined, so everything that must be
// reproducible draws through these instead.

/// Uniform double in [0, 1) from the top 53 bits of the generator.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform index in [0, n).
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::size_t i =
      static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

/// Standard normal sample (Box-Muller, two fresh draws per call).
inline double gaussian(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace spsu
