#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "ltcprune/dataset.hpp"
#include "ltcprune/errors.hpp"
#include "ltcprune/integrate.hpp"
#include "ltcprune/rng.hpp"
#include "ltcprune/signal.hpp"

namespace ltcprune {

enum class Testbed { mechanical, cstr, predprey };

inline const char* to_string(Testbed tb) {
  switch (tb) {
    case Testbed::mechanical: return "mechanical";
    case Testbed::cstr: return "cstr";
    case Testbed::predprey: return "predprey";
  }
  return "mechanical";
}

inline Testbed testbed_from_string(const std::string& s) {
  if (s == "mechanical") return Testbed::mechanical;
  if (s == "cstr") return Testbed::cstr;
  if (s == "predprey") return Testbed::predprey;
  throw config_error("unknown testbed '" + s + "' (expected mechanical|cstr|predprey)");
}

// ---------------------------------------------------------------------------
// Configs. Defaults put each system in its intended qualitative regime
// (damped oscillation / stirred-tank mixing / seasonal population cycles).

struct MechanicalConfig {
  double m = 1.0;   // mass
  double c = 0.3;   // damping coefficient
  double k = 2.0;   // spring stiffness
  double x0 = 1.0;
  double v0 = 0.0;
  double force_amplitude = 1.0;  // std of F(t) before standardization
  double force_cutoff = 0.1;     // low-pass cutoff, fraction of Nyquist
  double duration = 400.0;
  double dt = 0.05;
  std::uint64_t seed = 1;
};

struct CstrConfig {
  double f_out = 1.0;    // constant outflow rate
  double c_a_in = 1.0;   // inlet concentration
  double k_rate = 1.0;   // first-order reaction rate constant
  double v0 = 10.0;      // initial volume
  double c_a0 = 0.5;     // initial concentration
  double inflow_mean = 1.0;
  // Inflow fluctuation is deliberately large and fast: C_A responds on the
  // ~1/(F/V + k) timescale, so slow gentle inflow leaves the target almost
  // linear in (F_in, V) and the interaction product carries no usable signal.
  double inflow_noise = 0.5;   // std of the inflow fluctuation
  double inflow_cutoff = 0.2;
  double duration = 200.0;
  double dt = 0.05;
  std::uint64_t seed = 1;
};

struct PredPreyConfig {
  double alpha_base = 1.0;   // mean prey growth rate
  double alpha_amp = 0.3;    // seasonal sinusoid amplitude
  double alpha_period = 25.0;
  double alpha_noise = 0.1;  // std of the environmental fluctuation in alpha
  double alpha_noise_cutoff = 0.02;
  double beta = 0.4;    // predation coefficient
  double delta = 0.1;   // conversion efficiency
  double gamma = 0.4;   // predator death rate
  double prey0 = 10.0;
  double pred0 = 5.0;
  double duration = 200.0;
  double dt = 0.05;
  std::uint64_t seed = 1;
};

inline void validate(const MechanicalConfig& cfg) {
  if (!(cfg.m > 0.0)) throw config_error("mechanical: m must be > 0");
  if (!(cfg.c >= 0.0)) throw config_error("mechanical: c must be >= 0");
  if (!(cfg.k > 0.0)) throw config_error("mechanical: k must be > 0");
  if (!(cfg.dt > 0.0)) throw config_error("mechanical: dt must be > 0");
  if (!(cfg.duration >= 100.0 * cfg.dt))
    throw config_error("mechanical: duration must be >= 100*dt");
  if (!(cfg.force_amplitude >= 0.0))
    throw config_error("mechanical: force_amplitude must be >= 0");
}

inline void validate(const CstrConfig& cfg) {
  if (!(cfg.v0 > 0.0)) throw config_error("cstr: v0 must be > 0");
  if (!(cfg.f_out >= 0.0)) throw config_error("cstr: f_out must be >= 0");
  if (!(cfg.k_rate >= 0.0)) throw config_error("cstr: k_rate must be >= 0");
  if (!(cfg.inflow_mean > 0.0)) throw config_error("cstr: inflow_mean must be > 0");
  if (!(cfg.inflow_noise >= 0.0)) throw config_error("cstr: inflow_noise must be >= 0");
  if (!(cfg.dt > 0.0)) throw config_error("cstr: dt must be > 0");
  if (!(cfg.duration >= 100.0 * cfg.dt))
    throw config_error("cstr: duration must be >= 100*dt");
}

inline void validate(const PredPreyConfig& cfg) {
  if (!(cfg.beta >= 0.0)) throw config_error("predprey: beta must be >= 0");
  if (!(cfg.delta > 0.0)) throw config_error("predprey: delta must be > 0");
  if (!(cfg.gamma > 0.0)) throw config_error("predprey: gamma must be > 0");
  if (!(cfg.prey0 > 0.0)) throw config_error("predprey: prey0 must be > 0");
  if (!(cfg.pred0 > 0.0)) throw config_error("predprey: pred0 must be > 0");
  if (!(cfg.alpha_amp >= 0.0) || !(cfg.alpha_base > cfg.alpha_amp))
    throw config_error("predprey: need alpha_base > alpha_amp >= 0");
  if (!(cfg.alpha_noise >= 0.0))
    throw config_error("predprey: alpha_noise must be >= 0");
  if (!(cfg.dt > 0.0)) throw config_error("predprey: dt must be > 0");
  if (!(cfg.duration >= 100.0 * cfg.dt))
    throw config_error("predprey: duration must be >= 100*dt");
}

// ---------------------------------------------------------------------------
// Raw trajectories (unstandardized, on the uniform grid t[i] = i*dt).

struct MechanicalRaw {
  std::vector<double> t, F, x, xdot;
};

struct CstrRaw {
  std::vector<double> t, F_in, V, C_A;
};

struct PredPreyRaw {
  std::vector<double> t, alpha, prey, predator;
};

namespace detail {

inline std::size_t grid_size(double duration, double dt) {
  return static_cast<std::size_t>(std::llround(duration / dt)) + 1;
}

// Zero-mean, unit-sample-std smoothed noise scaled by `amplitude`.
// amplitude 0 short-circuits to a zero signal (used by the deterministic
// regression configs).
inline std::vector<double> scaled_noise(std::size_t n, double cutoff,
                                        double amplitude, std::uint64_t seed) {
  if (amplitude == 0.0) return std::vector<double>(n, 0.0);
  auto raw = smoothed_noise(n, cutoff, seed);
  auto st = standardize(raw);
  for (auto& v : st.values) v *= amplitude;
  return st.values;
}

}  // namespace detail

// m x'' + c x' + k x = F(t); F is smoothed noise held constant within each
// RK4 step (it is only defined on the sample grid).
inline MechanicalRaw simulate_mechanical(const MechanicalConfig& cfg) {
  validate(cfg);
  const std::size_t n = detail::grid_size(cfg.duration, cfg.dt);
  MechanicalRaw out;
  out.t.resize(n);
  out.F = detail::scaled_noise(n, cfg.force_cutoff, cfg.force_amplitude,
                               derive_seed(cfg.seed, 0));
  out.x.resize(n);
  out.xdot.resize(n);

  std::vector<double> y = {cfg.x0, cfg.v0};
  for (std::size_t i = 0; i < n; ++i) {
    out.t[i] = static_cast<double>(i) * cfg.dt;
    out.x[i] = y[0];
    out.xdot[i] = y[1];
    if (i + 1 == n) break;
    const double F = out.F[i];
    auto deriv = [&](double, const std::vector<double>& s) {
      return std::vector<double>{s[1], (F - cfg.c * s[1] - cfg.k * s[0]) / cfg.m};
    };
    y = rk4_step(deriv, out.t[i], y, cfg.dt);
  }
  return out;
}

// Volume balance V' = F_in - F_out together with the species balance
// d(C_A V)/dt = F_in c_in - F_out C_A - k C_A V, expanded by the product
// rule to C_A' = F_in (c_in - C_A)/V - k C_A.
inline CstrRaw simulate_cstr(const CstrConfig& cfg) {
  validate(cfg);
  const std::size_t n = detail::grid_size(cfg.duration, cfg.dt);
  CstrRaw out;
  out.t.resize(n);
  out.F_in = detail::scaled_noise(n, cfg.inflow_cutoff, cfg.inflow_noise,
                                  derive_seed(cfg.seed, 0));
  for (auto& f : out.F_in) f = std::max(0.0, f + cfg.inflow_mean);
  out.V.resize(n);
  out.C_A.resize(n);

  std::vector<double> y = {cfg.v0, cfg.c_a0};
  for (std::size_t i = 0; i < n; ++i) {
    out.t[i] = static_cast<double>(i) * cfg.dt;
    if (!(y[0] > 0.0))
      throw data_error("cstr: volume depleted at t=" + std::to_string(out.t[i]));
    out.V[i] = y[0];
    out.C_A[i] = y[1];
    if (i + 1 == n) break;
    const double f_in = out.F_in[i];
    auto deriv = [&](double, const std::vector<double>& s) {
      if (!(s[0] > 0.0))
        throw data_error("cstr: volume depleted at t=" + std::to_string(out.t[i]));
      return std::vector<double>{
          f_in - cfg.f_out,
          f_in * (cfg.c_a_in - s[1]) / s[0] - cfg.k_rate * s[1]};
    };
    y = rk4_step(deriv, out.t[i], y, cfg.dt);
  }
  return out;
}

// Prey' = alpha(t) Prey - beta Prey Pred; Pred' = delta Prey Pred - gamma Pred,
// with alpha(t) = base + seasonal sinusoid + smoothed environmental noise.
inline PredPreyRaw simulate_predprey(const PredPreyConfig& cfg) {
  validate(cfg);
  const std::size_t n = detail::grid_size(cfg.duration, cfg.dt);
  PredPreyRaw out;
  out.t.resize(n);
  out.alpha = detail::scaled_noise(n, cfg.alpha_noise_cutoff, cfg.alpha_noise,
                                   derive_seed(cfg.seed, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * cfg.dt;
    out.alpha[i] += cfg.alpha_base +
                    cfg.alpha_amp *
                        std::sin(2.0 * std::numbers::pi * t / cfg.alpha_period);
  }
  out.prey.resize(n);
  out.predator.resize(n);

  std::vector<double> y = {cfg.prey0, cfg.pred0};
  for (std::size_t i = 0; i < n; ++i) {
    out.t[i] = static_cast<double>(i) * cfg.dt;
    if (!(y[0] > 0.0) || !(y[1] > 0.0) || !std::isfinite(y[0]) ||
        !std::isfinite(y[1]))
      throw data_error("predprey: population left the positive orthant at t=" +
                       std::to_string(out.t[i]));
    out.prey[i] = y[0];
    out.predator[i] = y[1];
    if (i + 1 == n) break;
    const double a = out.alpha[i];
    auto deriv = [&](double, const std::vector<double>& s) {
      return std::vector<double>{a * s[0] - cfg.beta * s[0] * s[1],
                                 cfg.delta * s[0] * s[1] - cfg.gamma * s[1]};
    };
    y = rk4_step(deriv, out.t[i], y, cfg.dt);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dataset assembly: [drive, state, interaction, noise...] -> target.

namespace detail {

inline TimeSeriesDataset assemble_impl(
    const std::vector<double>& t, const std::string& drive_name,
    const std::vector<double>& drive, const std::string& state_name,
    const std::vector<double>& state, const std::string& interaction_name,
    const std::string& target_name, const std::vector<double>& target,
    std::size_t n_noise, std::uint64_t seed, double noise_cutoff) {
  const std::size_t n = t.size();
  if (drive.size() != n || state.size() != n || target.size() != n)
    throw data_error("assemble_dataset: trajectory length mismatch");

  TimeSeriesDataset ds;
  ds.t = t;
  auto push = [&](const std::string& name, const std::vector<double>& raw,
                  ChannelKind kind) {
    auto st = standardize(raw);
    ds.channels.push_back(
        Channel{ChannelMeta{name, st.mu, st.sigma, kind}, std::move(st.values)});
  };

  push(drive_name, drive, ChannelKind::physical);
  push(state_name, state, ChannelKind::physical);

  std::vector<double> interaction(n);
  for (std::size_t i = 0; i < n; ++i) interaction[i] = drive[i] * state[i];
  push(interaction_name, interaction, ChannelKind::interaction);

  for (std::size_t j = 0; j < n_noise; ++j) {
    auto noise = smoothed_noise(n, noise_cutoff, derive_seed(seed, 100 + j));
    push("noise" + std::to_string(j + 1), noise, ChannelKind::noise);
  }

  auto st = standardize(target);
  ds.target =
      Channel{ChannelMeta{target_name, st.mu, st.sigma, ChannelKind::target},
              std::move(st.values)};
  return ds;
}

}  // namespace detail

inline TimeSeriesDataset assemble_dataset(const MechanicalRaw& raw,
                                          std::size_t n_noise,
                                          std::uint64_t seed,
                                          double noise_cutoff = 0.02) {
  return detail::assemble_impl(raw.t, "F", raw.F, "x", raw.x,
                               "F_x_interaction", "xdot", raw.xdot, n_noise,
                               seed, noise_cutoff);
}

inline TimeSeriesDataset assemble_dataset(const CstrRaw& raw,
                                          std::size_t n_noise,
                                          std::uint64_t seed,
                                          double noise_cutoff = 0.02) {
  return detail::assemble_impl(raw.t, "F_in", raw.F_in, "V", raw.V,
                               "F_in_V_interaction", "C_A", raw.C_A, n_noise,
                               seed, noise_cutoff);
}

inline TimeSeriesDataset assemble_dataset(const PredPreyRaw& raw,
                                          std::size_t n_noise,
                                          std::uint64_t seed,
                                          double noise_cutoff = 0.02) {
  return detail::assemble_impl(raw.t, "alpha", raw.alpha, "P", raw.prey,
                               "alpha_P_interaction", "Predator", raw.predator,
                               n_noise, seed, noise_cutoff);
}

// Simulate + assemble + split in one call; what the CLI's generate does.
struct SplitSpec {
  double train_frac = 0.8;
  double val_frac_of_train = 0.2;
  std::size_t warmup = 50;
};

inline TimeSeriesDataset generate_dataset(const MechanicalConfig& cfg,
                                          std::size_t n_noise = 3,
                                          SplitSpec split = {}) {
  auto ds = assemble_dataset(simulate_mechanical(cfg), n_noise, cfg.seed);
  ds = chrono_split(std::move(ds), split.train_frac, split.val_frac_of_train,
                    split.warmup);
  validate(ds);
  return ds;
}

inline TimeSeriesDataset generate_dataset(const CstrConfig& cfg,
                                          std::size_t n_noise = 3,
                                          SplitSpec split = {}) {
  auto ds = assemble_dataset(simulate_cstr(cfg), n_noise, cfg.seed);
  ds = chrono_split(std::move(ds), split.train_frac, split.val_frac_of_train,
                    split.warmup);
  validate(ds);
  return ds;
}

inline TimeSeriesDataset generate_dataset(const PredPreyConfig& cfg,
                                          std::size_t n_noise = 3,
                                          SplitSpec split = {}) {
  auto ds = assemble_dataset(simulate_predprey(cfg), n_noise, cfg.seed);
  ds = chrono_split(std::move(ds), split.train_frac, split.val_frac_of_train,
                    split.warmup);
  validate(ds);
  return ds;
}

}  // namespace ltcprune
