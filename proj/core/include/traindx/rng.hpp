#pragma once

#include <cmath>
#include <cstdint>

namespace traindx {

/// Deterministic 64-bit splitmix generator. The standard-library
/// distributions are not pinned across implementations, so every random
/// draw in the project goes through this class: identical seeds produce
/// identical streams on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), using the top 53 bits of the stream.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  /// Standard normal deviate via Box-Muller on the splitmix stream.
  double normal() {
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    return box_muller(u1, u2);
  }

  /// Derives an independent generator; the parent stream advances once.
  Rng split() { return Rng(next_u64()); }

private:
  static double box_muller(double u1, double u2) {
    constexpr double two_pi = 6.28318530717958647692;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  std::uint64_t state_;
};

}  // namespace traindx
