#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ltcprune/dataset.hpp"
#include "ltcprune/errors.hpp"
#include "ltcprune/numeric.hpp"
#include "ltcprune/rng.hpp"

namespace ltcprune {

// Floor for the effective time constant; tau_i = softplus(tau_raw_i) + kTauMin.
inline constexpr double kTauMin = 0.01;

// Initial effective time constants are drawn log-uniform from this range so
// the network starts with a ladder of response speeds; a homogeneous start
// (all tau equal) trains far slower because every neuron filters identically.
inline constexpr double kTauInitLo = 0.02;
inline constexpr double kTauInitHi = 2.0;

struct LtcParameters {
  std::vector<double> tau_raw;  // length H
  std::vector<double> b;        // length H
  Matrix w_rec;                 // H x H recurrent weights
  Matrix w_in;                  // H x d input weights
  std::vector<double> readout_w;  // length H
  double readout_b = 0.0;

  std::size_t hidden() const { return tau_raw.size(); }
  std::size_t input_dim() const { return w_in.cols; }
  double effective_tau(std::size_t i) const {
    return softplus(tau_raw[i]) + kTauMin;
  }
};

// Uniform access to every trainable array; keeps Adam, clipping,
// serialization and finite-difference checks in lockstep over the same
// parameter order.
struct ParamView {
  const char* name;
  double* data;
  std::size_t size;
};

inline std::vector<ParamView> param_views(LtcParameters& p) {
  return {{"tau_raw", p.tau_raw.data(), p.tau_raw.size()},
          {"b", p.b.data(), p.b.size()},
          {"w_rec", p.w_rec.data.data(), p.w_rec.data.size()},
          {"w_in", p.w_in.data.data(), p.w_in.data.size()},
          {"readout_w", p.readout_w.data(), p.readout_w.size()},
          {"readout_b", &p.readout_b, 1}};
}

inline std::size_t param_count(const LtcParameters& p) {
  return p.tau_raw.size() + p.b.size() + p.w_rec.data.size() +
         p.w_in.data.size() + p.readout_w.size() + 1;
}

struct LtcState {
  std::vector<double> h;
};

struct ObserverModel {
  LtcParameters params;
  std::vector<std::string> channel_names;  // ordered input binding
  std::size_t hidden_size = 0;
  double dt = 0.05;
  std::uint64_t seed = 0;
  std::size_t epochs_run = 0;
  double best_val_loss = std::numeric_limits<double>::quiet_NaN();
};

inline void validate(const LtcParameters& p) {
  const std::size_t H = p.hidden();
  if (H == 0) throw config_error("ltc: hidden size must be >= 1");
  if (p.b.size() != H || p.w_rec.rows != H || p.w_rec.cols != H ||
      p.w_in.rows != H || p.readout_w.size() != H)
    throw mismatch_error("ltc: parameter shapes disagree on hidden size");
  if (p.w_in.cols == 0) throw config_error("ltc: input dim must be >= 1");
  for (auto& v : param_views(const_cast<LtcParameters&>(p)))
    if (!all_finite(std::span<const double>(v.data, v.size)))
      throw data_error(std::string("ltc: non-finite values in ") + v.name);
}

inline void validate(const ObserverModel& m) {
  validate(m.params);
  if (m.hidden_size != m.params.hidden())
    throw mismatch_error("model: hidden_size does not match parameters");
  if (m.channel_names.size() != m.params.input_dim())
    throw mismatch_error("model: channel_names length does not match input dim");
  std::set<std::string> uniq(m.channel_names.begin(), m.channel_names.end());
  if (uniq.size() != m.channel_names.size())
    throw mismatch_error("model: duplicate channel names");
  if (!(m.dt > 0.0)) throw config_error("model: dt must be > 0");
}

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero,
// effective tau log-uniform in [kTauInitLo, kTauInitHi].
inline LtcParameters init_params(std::size_t hidden_size, std::size_t input_dim,
                                 std::uint64_t seed) {
  if (hidden_size == 0 || input_dim == 0)
    throw config_error("init_params: hidden_size and input_dim must be >= 1");
  LtcParameters p;
  p.tau_raw.resize(hidden_size);
  p.b.assign(hidden_size, 0.0);
  p.w_rec = Matrix(hidden_size, hidden_size);
  p.w_in = Matrix(hidden_size, input_dim);
  p.readout_w.assign(hidden_size, 0.0);

  SplitMix64 rng(seed);
  const double rec_bound = 1.0 / std::sqrt(static_cast<double>(hidden_size));
  const double in_bound = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (auto& w : p.w_rec.data) w = rng.uniform(-rec_bound, rec_bound);
  for (auto& w : p.w_in.data) w = rng.uniform(-in_bound, in_bound);
  for (auto& w : p.readout_w) w = rng.uniform(-rec_bound, rec_bound);
  p.readout_b = 0.0;

  // Taus come from their own derived stream so the weight draws above stay
  // pinned when the init range changes.
  SplitMix64 tau_rng(derive_seed(seed, 999));
  const double log_span = std::log(kTauInitHi / kTauInitLo);
  for (auto& tr : p.tau_raw) {
    const double tau = kTauInitLo * std::exp(tau_rng.uniform(0.0, log_span));
    tr = inv_softplus(tau - kTauMin);
  }
  return p;
}

namespace detail {

// One semi-implicit update given precomputed tanh(h), tanh(u) and the
// per-neuron A = dt/tau, invD = 1/(1+A). Shared by ltc_step and the training
// loop so both produce bit-identical trajectories.
inline void ltc_step_kernel(const LtcParameters& p,
                            const std::vector<double>& h_prev,
                            const std::vector<double>& tanh_h,
                            const std::vector<double>& tanh_u,
                            const std::vector<double>& A,
                            const std::vector<double>& invD,
                            std::vector<double>& h_out) {
  const std::size_t H = p.hidden();
  const std::size_t d = p.input_dim();
  for (std::size_t i = 0; i < H; ++i) {
    double drive = p.b[i];
    const double* wr = p.w_rec.row(i);
    for (std::size_t j = 0; j < H; ++j) drive += wr[j] * tanh_h[j];
    const double* wi = p.w_in.row(i);
    for (std::size_t k = 0; k < d; ++k) drive += wi[k] * tanh_u[k];
    h_out[i] = (h_prev[i] + A[i] * drive) * invD[i];
  }
}

inline void fill_step_coeffs(const LtcParameters& p, double dt,
                             std::vector<double>& A,
                             std::vector<double>& invD) {
  const std::size_t H = p.hidden();
  A.resize(H);
  invD.resize(H);
  for (std::size_t i = 0; i < H; ++i) {
    A[i] = dt / p.effective_tau(i);
    invD[i] = 1.0 / (1.0 + A[i]);
  }
}

}  // namespace detail

inline LtcState ltc_step(const LtcState& state, std::span<const double> u,
                         const LtcParameters& p, double dt) {
  if (!(dt > 0.0)) throw config_error("ltc_step: dt must be > 0");
  const std::size_t H = p.hidden();
  if (state.h.size() != H) throw mismatch_error("ltc_step: state size mismatch");
  if (u.size() != p.input_dim())
    throw mismatch_error("ltc_step: input length does not match input dim");

  std::vector<double> tanh_h(H), tanh_u(u.size());
  for (std::size_t j = 0; j < H; ++j) tanh_h[j] = std::tanh(state.h[j]);
  for (std::size_t k = 0; k < u.size(); ++k) tanh_u[k] = std::tanh(u[k]);
  std::vector<double> A, invD;
  detail::fill_step_coeffs(p, dt, A, invD);

  LtcState out;
  out.h.resize(H);
  detail::ltc_step_kernel(p, state.h, tanh_h, tanh_u, A, invD, out.h);
  for (std::size_t i = 0; i < H; ++i)
    if (!std::isfinite(out.h[i]))
      throw data_error("ltc_step: non-finite activation at neuron " +
                       std::to_string(i));
  return out;
}

inline double readout(const LtcState& state, const LtcParameters& p) {
  if (state.h.size() != p.hidden())
    throw mismatch_error("readout: state size mismatch");
  double acc = p.readout_b;
  for (std::size_t i = 0; i < state.h.size(); ++i)
    acc += p.readout_w[i] * state.h[i];
  return acc;
}

struct ForwardResult {
  Matrix hidden;                  // N x H, post-update state at each sample
  std::vector<double> estimates;  // length N
};

// Runs the observer over a full input matrix (columns ordered per
// model.channel_names). h0 defaults to zeros.
inline ForwardResult forward(const ObserverModel& model, const Matrix& inputs,
                             const LtcState* h0 = nullptr) {
  const std::size_t H = model.params.hidden();
  const std::size_t d = model.params.input_dim();
  if (inputs.cols != d)
    throw mismatch_error("forward: input matrix has " +
                         std::to_string(inputs.cols) + " columns, model binds " +
                         std::to_string(d) + " channels");
  if (h0 && h0->h.size() != H)
    throw mismatch_error("forward: initial state size mismatch");

  ForwardResult out;
  out.hidden = Matrix(inputs.rows, H);
  out.estimates.resize(inputs.rows);
  if (inputs.rows == 0) return out;

  std::vector<double> h = h0 ? h0->h : std::vector<double>(H, 0.0);
  std::vector<double> h_next(H), tanh_h(H), tanh_u(d);
  std::vector<double> A, invD;
  detail::fill_step_coeffs(model.params, model.dt, A, invD);

  for (std::size_t n = 0; n < inputs.rows; ++n) {
    for (std::size_t j = 0; j < H; ++j) tanh_h[j] = std::tanh(h[j]);
    const double* u = inputs.row(n);
    for (std::size_t k = 0; k < d; ++k) tanh_u[k] = std::tanh(u[k]);
    detail::ltc_step_kernel(model.params, h, tanh_h, tanh_u, A, invD, h_next);
    std::swap(h, h_next);
    double est = model.params.readout_b;
    for (std::size_t i = 0; i < H; ++i) {
      if (!std::isfinite(h[i]))
        throw data_error("forward: non-finite activation at neuron " +
                         std::to_string(i) + ", step " + std::to_string(n));
      out.hidden.at(n, i) = h[i];
      est += model.params.readout_w[i] * h[i];
    }
    out.estimates[n] = est;
  }
  return out;
}

// Column indices (in model order) of the kept channels.
inline std::vector<std::size_t> restrict_channels(
    const ObserverModel& model, const std::set<std::string>& keep) {
  if (keep.empty()) throw mismatch_error("restrict_channels: empty selection");
  for (const auto& name : keep)
    if (std::find(model.channel_names.begin(), model.channel_names.end(),
                  name) == model.channel_names.end())
      throw mismatch_error("restrict_channels: channel '" + name +
                           "' not bound by model");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < model.channel_names.size(); ++i)
    if (keep.count(model.channel_names[i])) idx.push_back(i);
  return idx;
}

}  // namespace ltcprune
