#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ltcprune/dataset.hpp"
#include "ltcprune/errors.hpp"
#include "ltcprune/ltc.hpp"

namespace ltcprune {

struct PerturbationSpec {
  double epsilon = 5e-3;          // in units of the channel's (unit) std
  std::size_t window_start = 50;  // first evaluated index in the segment
  std::size_t window_len = 0;     // 0 = remainder of the segment
  Segment segment = Segment::val;
};

inline void validate(const PerturbationSpec& spec) {
  if (!(spec.epsilon >= 0.0))
    throw config_error("perturbation: epsilon must be >= 0");
}

struct CausalityEntry {
  std::string name;
  double score = 0.0;
  std::size_t rank = 0;  // 1 = highest score
};

struct CausalityReport {
  std::vector<CausalityEntry> entries;  // ordered by rank
  PerturbationSpec spec;
  std::uint64_t model_seed = 0;
  std::size_t hidden_size = 0;
  std::size_t forward_passes = 0;

  const CausalityEntry* find(const std::string& name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }
  double max_score() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.score);
    return m;
  }
};

// Constant additive offset on column j; the input matrix is left untouched.
inline Matrix perturb_channel(const Matrix& inputs, std::size_t j,
                              double epsilon) {
  if (j >= inputs.cols)
    throw mismatch_error("perturb_channel: column " + std::to_string(j) +
                         " out of range");
  Matrix out = inputs;
  for (std::size_t r = 0; r < out.rows; ++r) out.at(r, j) += epsilon;
  return out;
}

// Injection point for tests that count forward passes.
using ForwardFn = std::function<ForwardResult(const ObserverModel&, const Matrix&)>;

namespace detail {

inline ForwardResult run_forward(const ObserverModel& model, const Matrix& in,
                                 const ForwardFn& fn) {
  return fn ? fn(model, in) : forward(model, in);
}

struct ScoreWindow {
  std::size_t begin = 0;
  std::size_t end = 0;
};

inline ScoreWindow score_window(const PerturbationSpec& spec, std::size_t n) {
  const std::size_t begin = spec.window_start;
  const std::size_t end =
      spec.window_len == 0 ? n : std::min(n, begin + spec.window_len);
  if (begin >= end)
    throw data_error("causality: evaluation window is empty");
  return {begin, end};
}

inline double mean_abs_delta(const std::vector<double>& base,
                             const std::vector<double>& pert,
                             ScoreWindow w) {
  double acc = 0.0;
  for (std::size_t n = w.begin; n < w.end; ++n)
    acc += std::abs(pert[n] - base[n]);
  return acc / static_cast<double>(w.end - w.begin);
}

}  // namespace detail

// Output deviation induced by perturbing channel j, both runs from zero state.
inline std::vector<double> trajectory_delta(const ObserverModel& model,
                                            const Matrix& inputs, std::size_t j,
                                            double epsilon,
                                            const ForwardFn& fwd = {}) {
  const ForwardResult base = detail::run_forward(model, inputs, fwd);
  const ForwardResult pert =
      detail::run_forward(model, perturb_channel(inputs, j, epsilon), fwd);
  std::vector<double> delta(inputs.rows);
  for (std::size_t n = 0; n < inputs.rows; ++n)
    delta[n] = pert.estimates[n] - base.estimates[n];
  return delta;
}

// Time-averaged |deviation| over the evaluation window.
inline double causality_score(const ObserverModel& model, const Matrix& inputs,
                              std::size_t j, const PerturbationSpec& spec,
                              const ForwardFn& fwd = {}) {
  validate(spec);
  const auto w = detail::score_window(spec, inputs.rows);
  const ForwardResult base = detail::run_forward(model, inputs, fwd);
  const ForwardResult pert =
      detail::run_forward(model, perturb_channel(inputs, j, spec.epsilon), fwd);
  return detail::mean_abs_delta(base.estimates, pert.estimates, w);
}

// One baseline pass plus one perturbed pass per channel: d + 1 total.
inline CausalityReport causality_report(const ObserverModel& model,
                                        const TimeSeriesDataset& ds,
                                        const PerturbationSpec& spec,
                                        const ForwardFn& fwd = {}) {
  validate(spec);
  validate(model);
  const SegmentRange range = segment_range(ds, spec.segment);
  const Matrix inputs = gather_inputs(ds, model.channel_names, range);
  const auto w = detail::score_window(spec, inputs.rows);

  CausalityReport report;
  report.spec = spec;
  report.model_seed = model.seed;
  report.hidden_size = model.hidden_size;

  const ForwardResult base = detail::run_forward(model, inputs, fwd);
  report.forward_passes = 1;
  const std::size_t d = model.channel_names.size();
  report.entries.reserve(d);
  for (std::size_t j = 0; j < d; ++j) {
    const ForwardResult pert = detail::run_forward(
        model, perturb_channel(inputs, j, spec.epsilon), fwd);
    report.forward_passes += 1;
    CausalityEntry e;
    e.name = model.channel_names[j];
    e.score = detail::mean_abs_delta(base.estimates, pert.estimates, w);
    report.entries.push_back(std::move(e));
  }

  std::sort(report.entries.begin(), report.entries.end(),
            [](const CausalityEntry& a, const CausalityEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.name < b.name;
            });
  for (std::size_t i = 0; i < report.entries.size(); ++i)
    report.entries[i].rank = i + 1;
  return report;
}

}  // namespace ltcprune
