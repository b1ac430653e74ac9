#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ltcprune/dataset.hpp"
#include "ltcprune/errors.hpp"
#include "ltcprune/ltc.hpp"
#include "ltcprune/numeric.hpp"

namespace ltcprune {

struct TrainConfig {
  double lr = 1e-3;
  std::size_t max_epochs = 100;
  double clip_norm = 1.0;         // global L2 ceiling
  std::size_t patience = 30;      // epochs without val improvement
  std::size_t warmup_steps = 50;  // skipped in losses/metrics
  std::size_t window_len = 128;   // truncated-unroll window
  std::size_t window_stride = 64;
  std::size_t n_seeds = 3;
  std::size_t hidden_size = 32;
  std::uint64_t seed = 1;  // base seed; run i uses seed + i
};

inline void validate(const TrainConfig& cfg) {
  if (!(cfg.lr > 0.0)) throw config_error("train: lr must be > 0");
  if (!(cfg.clip_norm > 0.0)) throw config_error("train: clip_norm must be > 0");
  if (cfg.max_epochs == 0) throw config_error("train: max_epochs must be >= 1");
  if (cfg.n_seeds == 0) throw config_error("train: n_seeds must be >= 1");
  if (cfg.hidden_size == 0) throw config_error("train: hidden_size must be >= 1");
  if (cfg.window_stride == 0) throw config_error("train: window_stride must be >= 1");
  if (cfg.window_len <= cfg.warmup_steps)
    throw config_error("train: window_len must exceed warmup_steps");
}

struct TrainReport {
  std::vector<double> train_loss;  // per epoch, mean over windows
  std::vector<double> val_loss;    // per epoch
  std::size_t best_epoch = 0;      // 1-based index into the arrays
  double best_val_loss = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::size_t epochs_run = 0;
  std::string stop_reason;         // early_stop | max_epochs
  bool warmup_in_windows = true;   // warm-up skip applied inside windows
};

// Gradients mirror the parameter layout exactly.
using LtcGradients = LtcParameters;

inline LtcGradients zero_gradients(const LtcParameters& p) {
  LtcGradients g;
  g.tau_raw.assign(p.tau_raw.size(), 0.0);
  g.b.assign(p.b.size(), 0.0);
  g.w_rec = Matrix(p.w_rec.rows, p.w_rec.cols);
  g.w_in = Matrix(p.w_in.rows, p.w_in.cols);
  g.readout_w.assign(p.readout_w.size(), 0.0);
  g.readout_b = 0.0;
  return g;
}

inline double mse_loss(std::span<const double> pred, std::span<const double> ref,
                       std::size_t skip) {
  if (pred.size() != ref.size())
    throw mismatch_error("mse_loss: sequence lengths differ");
  if (pred.size() <= skip)
    throw data_error("mse_loss: no samples left after warm-up skip");
  double acc = 0.0;
  for (std::size_t n = skip; n < pred.size(); ++n) {
    const double r = pred[n] - ref[n];
    acc += r * r;
  }
  return acc / static_cast<double>(pred.size() - skip);
}

// Reverse-mode gradient of the warm-up-skipped MSE through the unrolled
// semi-implicit updates. Exact for the discretized system. Optionally
// reports the loss of the underlying forward pass.
inline LtcGradients backward(const ObserverModel& model, const Matrix& inputs,
                             std::span<const double> target, std::size_t skip,
                             double* loss_out = nullptr) {
  const LtcParameters& p = model.params;
  const std::size_t H = p.hidden();
  const std::size_t d = p.input_dim();
  const std::size_t N = inputs.rows;
  if (inputs.cols != d) throw mismatch_error("backward: input width mismatch");
  if (target.size() != N) throw mismatch_error("backward: target length mismatch");
  if (N <= skip) throw data_error("backward: no samples left after warm-up skip");

  std::vector<double> A, invD;
  detail::fill_step_coeffs(p, model.dt, A, invD);

  // Forward sweep, storing everything the reverse sweep needs.
  Matrix h_all(N, H);        // h after step n
  Matrix tanh_h_all(N, H);   // tanh of the PRE-step state used at step n
  Matrix tanh_u_all(N, d);
  Matrix drive_all(N, H);
  std::vector<double> pred(N);
  std::vector<double> h(H, 0.0), tanh_h(H);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t j = 0; j < H; ++j) tanh_h[j] = std::tanh(h[j]);
    const double* u = inputs.row(n);
    double* tu = tanh_u_all.row(n);
    for (std::size_t k = 0; k < d; ++k) tu[k] = std::tanh(u[k]);
    double est = p.readout_b;
    for (std::size_t i = 0; i < H; ++i) {
      double drive = p.b[i];
      const double* wr = p.w_rec.row(i);
      for (std::size_t j = 0; j < H; ++j) drive += wr[j] * tanh_h[j];
      const double* wi = p.w_in.row(i);
      for (std::size_t k = 0; k < d; ++k) drive += wi[k] * tu[k];
      const double hn = (h[i] + A[i] * drive) * invD[i];
      tanh_h_all.at(n, i) = tanh_h[i];
      drive_all.at(n, i) = drive;
      h_all.at(n, i) = hn;
      h[i] = hn;
      est += p.readout_w[i] * hn;
    }
    pred[n] = est;
  }

  const auto M = static_cast<double>(N - skip);
  if (loss_out) {
    double acc = 0.0;
    for (std::size_t n = skip; n < N; ++n) {
      const double r = pred[n] - target[n];
      acc += r * r;
    }
    *loss_out = acc / M;
  }

  LtcGradients g = zero_gradients(p);
  std::vector<double> g_h(H, 0.0), g_h_prev(H);
  for (std::size_t n = N; n-- > 0;) {
    if (n >= skip) {
      const double r = 2.0 * (pred[n] - target[n]) / M;
      g.readout_b += r;
      for (std::size_t i = 0; i < H; ++i) {
        g.readout_w[i] += r * h_all.at(n, i);
        g_h[i] += r * p.readout_w[i];
      }
    }
    // Through h_n = (h_{n-1} + A*drive) * invD.
    std::fill(g_h_prev.begin(), g_h_prev.end(), 0.0);
    for (std::size_t i = 0; i < H; ++i) {
      const double G = g_h[i];
      if (G == 0.0) continue;
      const double h_prev = n > 0 ? h_all.at(n - 1, i) : 0.0;
      const double drive = drive_all.at(n, i);
      const double g_drive = G * A[i] * invD[i];
      g.b[i] += g_drive;
      const double* th = tanh_h_all.row(n);
      double* gwr = g.w_rec.row(i);
      const double* wr = p.w_rec.row(i);
      for (std::size_t j = 0; j < H; ++j) {
        gwr[j] += g_drive * th[j];
        g_h_prev[j] += g_drive * wr[j] * (1.0 - th[j] * th[j]);
      }
      const double* tu = tanh_u_all.row(n);
      double* gwi = g.w_in.row(i);
      for (std::size_t k = 0; k < d; ++k) gwi[k] += g_drive * tu[k];
      // tau path: dh/dA = (drive - h_prev)*invD^2, dA/dtau = -dt/tau^2.
      const double tau = p.effective_tau(i);
      g.tau_raw[i] += G * (drive - h_prev) * invD[i] * invD[i] *
                      (-model.dt / (tau * tau)) * sigmoid(p.tau_raw[i]);
      g_h_prev[i] += G * invD[i];  // leak path
    }
    std::swap(g_h, g_h_prev);
  }

  for (const auto& v : param_views(g))
    if (!all_finite(std::span<const double>(v.data, v.size)))
      throw data_error(std::string("backward: non-finite gradient in ") + v.name);
  return g;
}

inline double gradient_norm(LtcGradients& g) {
  double acc = 0.0;
  for (const auto& v : param_views(g))
    for (std::size_t i = 0; i < v.size; ++i) acc += v.data[i] * v.data[i];
  return std::sqrt(acc);
}

// Scales in place so the global L2 norm is at most max_norm.
inline void clip_gradients(LtcGradients& g, double max_norm) {
  if (!(max_norm > 0.0)) throw config_error("clip_gradients: max_norm must be > 0");
  const double norm = gradient_norm(g);
  if (norm <= max_norm) return;
  const double scale = max_norm / norm;
  for (auto& v : param_views(g))
    for (std::size_t i = 0; i < v.size; ++i) v.data[i] *= scale;
}

struct AdamState {
  std::vector<double> m, v;  // flattened over param_views order
  std::size_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

inline AdamState make_adam_state(const LtcParameters& p) {
  AdamState s;
  s.m.assign(param_count(p), 0.0);
  s.v.assign(param_count(p), 0.0);
  return s;
}

inline void adam_update(LtcParameters& params, LtcGradients& grads,
                        AdamState& state, double lr) {
  state.t += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  auto pv = param_views(params);
  auto gv = param_views(grads);
  std::size_t flat = 0;
  for (std::size_t f = 0; f < pv.size(); ++f) {
    if (pv[f].size != gv[f].size)
      throw mismatch_error("adam_update: gradient shape mismatch");
    for (std::size_t i = 0; i < pv[f].size; ++i, ++flat) {
      const double g = gv[f].data[i];
      state.m[flat] = state.beta1 * state.m[flat] + (1.0 - state.beta1) * g;
      state.v[flat] = state.beta2 * state.v[flat] + (1.0 - state.beta2) * g * g;
      const double mhat = state.m[flat] / c1;
      const double vhat = state.v[flat] / c2;
      pv[f].data[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

struct EvalMetrics {
  double mse = 0.0;
  double rmse = 0.0;
};

// Fresh zero state at segment start; metrics over indices >= warmup, in
// standardized target units.
inline EvalMetrics evaluate(const ObserverModel& model,
                            const TimeSeriesDataset& ds, Segment segment,
                            std::size_t warmup = 50) {
  const SegmentRange range = segment_range(ds, segment);
  if (range.length() <= warmup)
    throw data_error(std::string("evaluate: ") + to_string(segment) +
                     " segment has no samples after warm-up");
  const Matrix inputs = gather_inputs(ds, model.channel_names, range);
  const auto target = gather_target(ds, range);
  const ForwardResult fwd = forward(model, inputs);
  EvalMetrics m;
  m.mse = mse_loss(fwd.estimates, target, warmup);
  m.rmse = std::sqrt(m.mse);
  return m;
}

inline std::vector<std::size_t> window_starts(std::size_t n,
                                              std::size_t window_len,
                                              std::size_t stride) {
  std::vector<std::size_t> starts;
  if (n < window_len) {
    starts.push_back(0);  // short segment: one whole-segment window
    return starts;
  }
  for (std::size_t s = 0; s + window_len <= n; s += stride) starts.push_back(s);
  return starts;
}

// One model, one seed. Truncated-window BPTT over the training segment,
// one Adam step per window, early stopping on validation loss.
inline std::pair<ObserverModel, TrainReport> train(
    const TimeSeriesDataset& ds, const std::vector<std::string>& channels,
    const TrainConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  validate(ds);
  if (channels.empty()) throw config_error("train: empty channel set");
  if (ds.size() < 2) throw data_error("train: dataset too small");

  const SegmentRange train_range = segment_range(ds, Segment::train);
  const SegmentRange val_range = segment_range(ds, Segment::val);
  if (train_range.length() <= cfg.warmup_steps ||
      val_range.length() <= cfg.warmup_steps)
    throw data_error("train: a segment is shorter than the warm-up period");

  const Matrix train_in = gather_inputs(ds, channels, train_range);
  const auto train_tgt = gather_target(ds, train_range);
  const double grid_dt = ds.t[1] - ds.t[0];

  ObserverModel model;
  model.params = init_params(cfg.hidden_size, channels.size(), seed);
  model.channel_names = channels;
  model.hidden_size = cfg.hidden_size;
  model.dt = grid_dt;
  model.seed = seed;

  const auto starts =
      window_starts(train_range.length(), cfg.window_len, cfg.window_stride);
  AdamState adam = make_adam_state(model.params);

  TrainReport report;
  report.seed = seed;
  LtcParameters best_params = model.params;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  std::size_t stall = 0;
  report.stop_reason = "max_epochs";

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (const std::size_t s : starts) {
      const std::size_t len =
          std::min(cfg.window_len, train_range.length() - s);
      Matrix win(len, train_in.cols);
      std::copy(train_in.row(s), train_in.row(s) + len * train_in.cols,
                win.data.begin());
      std::span<const double> tgt(train_tgt.data() + s, len);
      const std::size_t skip = len > cfg.warmup_steps ? cfg.warmup_steps : 0;
      double loss = 0.0;
      LtcGradients g = backward(model, win, tgt, skip, &loss);
      clip_gradients(g, cfg.clip_norm);
      adam_update(model.params, g, adam, cfg.lr);
      epoch_loss += loss;
    }
    report.train_loss.push_back(epoch_loss / static_cast<double>(starts.size()));

    const EvalMetrics vm = evaluate(model, ds, Segment::val, cfg.warmup_steps);
    report.val_loss.push_back(vm.mse);
    report.epochs_run = epoch;

    if (vm.mse < best_val) {
      best_val = vm.mse;
      best_params = model.params;
      best_epoch = epoch;
      stall = 0;
    } else {
      stall += 1;
      if (stall > cfg.patience) {
        report.stop_reason = "early_stop";
        break;
      }
    }
  }

  model.params = best_params;
  model.epochs_run = report.epochs_run;
  model.best_val_loss = best_val;
  report.best_val_loss = best_val;
  report.best_epoch = best_epoch;
  return {std::move(model), std::move(report)};
}

struct MultiSeedResult {
  ObserverModel best;
  std::vector<TrainReport> reports;
  std::size_t best_index = 0;  // into reports
};

// Trains cfg.n_seeds models (seeds cfg.seed, cfg.seed+1, ...) and keeps the
// one with the lowest best validation loss; ties go to the lower seed.
inline MultiSeedResult multi_seed_train(const TimeSeriesDataset& ds,
                                        const std::vector<std::string>& channels,
                                        const TrainConfig& cfg) {
  validate(cfg);
  MultiSeedResult out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cfg.n_seeds; ++i) {
    auto [model, report] = train(ds, channels, cfg, cfg.seed + i);
    if (report.best_val_loss < best) {
      best = report.best_val_loss;
      out.best = std::move(model);
      out.best_index = i;
    }
    out.reports.push_back(std::move(report));
  }
  return out;
}

}  // namespace ltcprune
