#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rifield::rng {

// Counter-based generator built on the splitmix64 output function.
// Every draw is a pure function of (seed, counter), so replica streams can be
// derived and consumed in any order, on any number of threads, and still
// reproduce bit-identically.

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t at(std::uint64_t seed, std::uint64_t counter) {
  return mix(seed + (counter + 1) * kGamma);
}

/// Child seed for an indexed substream (replica, level, cell, ...).
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
  return mix(at(seed, stream) ^ 0xD1B54A32D192ED03ull);
}

struct Stream {
  std::uint64_t seed = 0;
  std::uint64_t counter = 0;

  std::uint64_t next_bits() { return at(seed, counter++); }

  /// Uniform in (0, 1].
  double u01() {
    return static_cast<double>((next_bits() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double normal() {
    const double u1 = u01();
    const double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Rademacher +-1.
  double sign() { return (next_bits() & 1u) ? 1.0 : -1.0; }
};

}  // namespace rifield::rng
