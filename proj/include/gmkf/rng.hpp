#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "gmkf/common.hpp"

namespace gmkf {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seeded random source. Normal deviates are produced by Box-Muller on
/// fixed-width uniforms, so sequences depend only on the seed and the call
/// order, not on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Independent stream for Monte-Carlo run `index`, derived from a root
  /// seed via a counter scheme. Stable under any scheduling of the runs.
  static Rng stream(std::uint64_t root_seed, std::uint64_t index) {
    return Rng(splitmix64(root_seed ^ (0xA3EC647659359ACDULL * (index + 1))));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gmkf
