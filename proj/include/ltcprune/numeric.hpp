#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ltcprune/errors.hpp"

namespace ltcprune {

inline double softplus(double x) {
  if (x > 30.0) return x;
  return std::log1p(std::exp(x));
}

// Inverse of softplus; valid for y > 0.
inline double inv_softplus(double y) {
  if (y > 30.0) return y;
  return std::log(std::expm1(y));
}

inline double sigmoid(double x) {
  if (x >= 0.0) {
    const double z = std::exp(-x);
    return 1.0 / (1.0 + z);
  }
  const double z = std::exp(x);
  return z / (1.0 + z);
}

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Sample standard deviation (n-1 denominator).
inline double sample_std(std::span<const double> v) {
  if (v.size() < 2) throw data_error("sample_std: need at least 2 values");
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) {
    const double d = x - mu;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// 17 significant digits: enough to round-trip any IEEE-754 double exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// FNV-1a, used for deterministic run ids.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace ltcprune
