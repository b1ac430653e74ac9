#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ltcprune/errors.hpp"
#include "ltcprune/numeric.hpp"
#include "ltcprune/rng.hpp"

namespace ltcprune {

// Temporally correlated noise: Gaussian white sequence through a single-pole
// low-pass y_t = a*y_{t-1} + (1-a)*w_t with a = exp(-2*pi*cutoff), run forward
// then backward to cancel phase lag. cutoff is a fraction of Nyquist.
inline std::vector<double> smoothed_noise(std::size_t length, double cutoff,
                                          std::uint64_t seed) {
  if (length == 0) throw data_error("smoothed_noise: empty length");
  if (!(cutoff > 0.0 && cutoff < 1.0))
    throw config_error("smoothed_noise: cutoff must be in (0, 1)");

  constexpr double two_pi = 6.283185307179586476925286766559;
  const double a = std::exp(-two_pi * cutoff);
  const double b = 1.0 - a;

  SplitMix64 rng(seed);
  std::vector<double> y(length);
  double acc = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    acc = a * acc + b * rng.gaussian();
    y[i] = acc;
  }
  acc = 0.0;
  for (std::size_t i = length; i-- > 0;) {
    acc = a * acc + b * y[i];
    y[i] = acc;
  }
  return y;
}

struct Standardized {
  std::vector<double> values;
  double mu = 0.0;
  double sigma = 1.0;
};

// Zero-mean, unit-sample-std transform; keeps (mu, sigma) for inversion.
inline Standardized standardize(std::span<const double> signal) {
  if (signal.size() < 2) throw data_error("standardize: need at least 2 samples");
  const double mu = mean(signal);
  const double sigma = sample_std(signal);
  if (!(sigma > 0.0))
    throw data_error("standardize: degenerate channel (zero variance)");
  Standardized out;
  out.mu = mu;
  out.sigma = sigma;
  out.values.resize(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i)
    out.values[i] = (signal[i] - mu) / sigma;
  return out;
}

}  // namespace ltcprune
