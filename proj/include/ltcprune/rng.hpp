#pragma once

#include <cmath>
#include <cstdint>

namespace ltcprune {

// splitmix64 generator with hand-rolled distributions. Standard-library
// distributions are implementation-defined, which would break the
// byte-identical-rerun guarantee, so everything random flows through here.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Box-Muller, one variate per call (the sine branch is discarded so the
  // draw count stays one-to-one with calls).
  double gaussian() {
    constexpr double two_pi = 6.283185307179586476925286766559;
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  std::uint64_t state_;
};

// Decorrelated child seed for a named stream (forcing, noise channels, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  SplitMix64 rng(base ^ (stream * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull));
  return rng.next_u64();
}

}  // namespace ltcprune
