#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ltcprune/errors.hpp"
#include "ltcprune/numeric.hpp"

namespace ltcprune {

// One classical fourth-order Runge-Kutta step:
//   y' = y + (dt/6) (k1 + 2 k2 + 2 k3 + k4).
// Deriv is any callable (double t, const std::vector<double>& y) -> std::vector<double>.
template <typename Deriv>
std::vector<double> rk4_step(Deriv&& deriv, double t, const std::vector<double>& y,
                             double dt) {
  if (!(dt > 0.0)) throw config_error("rk4_step: dt must be positive");
  const std::size_t n = y.size();

  auto check = [&](const std::vector<double>& k) {
    if (k.size() != n)
      throw data_error("rk4_step: derivative dimension mismatch at t=" +
                       format_double(t));
    if (!all_finite(k))
      throw data_error("rk4_step: non-finite derivative at t=" + format_double(t));
  };

  const std::vector<double> k1 = deriv(t, y);
  check(k1);

  std::vector<double> tmp(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  const std::vector<double> k2 = deriv(t + 0.5 * dt, tmp);
  check(k2);

  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  const std::vector<double> k3 = deriv(t + 0.5 * dt, tmp);
  check(k3);

  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
  const std::vector<double> k4 = deriv(t + dt, tmp);
  check(k4);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = y[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  if (!all_finite(out))
    throw data_error("rk4_step: non-finite state after step at t=" + format_double(t));
  return out;
}

}  // namespace ltcprune
