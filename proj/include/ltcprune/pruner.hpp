#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "ltcprune/causality.hpp"
#include "ltcprune/dataset.hpp"
#include "ltcprune/errors.hpp"
#include "ltcprune/training.hpp"

namespace ltcprune {

enum class ThresholdMode { relative, absolute };

inline const char* to_string(ThresholdMode m) {
  return m == ThresholdMode::relative ? "relative" : "absolute";
}

inline ThresholdMode threshold_mode_from_string(const std::string& s) {
  if (s == "relative") return ThresholdMode::relative;
  if (s == "absolute") return ThresholdMode::absolute;
  throw config_error("unknown threshold mode '" + s + "'");
}

struct PruneConfig {
  ThresholdMode threshold_mode = ThresholdMode::relative;
  double threshold_tau = 0.05;    // fraction of max score in relative mode
  double degradation_tol = 0.10;  // allowed relative val-loss increase
  std::size_t min_sensors = 1;
  std::size_t max_iters = 10;
  PerturbationSpec spec;
  TrainConfig train_cfg;
};

inline void validate(const PruneConfig& cfg) {
  if (!(cfg.threshold_tau > 0.0))
    throw config_error("prune: threshold_tau must be > 0");
  if (!(cfg.degradation_tol >= 0.0))
    throw config_error("prune: degradation_tol must be >= 0");
  if (cfg.min_sensors == 0) throw config_error("prune: min_sensors must be >= 1");
  if (cfg.max_iters == 0) throw config_error("prune: max_iters must be >= 1");
  validate(cfg.spec);
  validate(cfg.train_cfg);
}

struct PruneSelection {
  std::vector<std::string> remove;  // lowest score first
  bool no_removable = false;
};

// Channels scoring below the threshold; falls back to the single
// lowest-scoring channel when none do. Never shrinks the survivor set
// below min_sensors (trimming drops the highest-scoring candidates first).
inline PruneSelection select_prunable(const CausalityReport& report,
                                      const PruneConfig& cfg) {
  if (report.entries.empty())
    throw data_error("select_prunable: empty causality report");
  const std::size_t d = report.entries.size();
  if (d <= cfg.min_sensors) return {{}, true};

  const double max_score = report.max_score();
  const double tau_eff = cfg.threshold_mode == ThresholdMode::relative
                             ? cfg.threshold_tau * max_score
                             : cfg.threshold_tau;

  // Entries are rank-ordered (descending score, ties by name), so walking
  // backwards enumerates candidates lowest-score-first.
  std::vector<CausalityEntry> candidates;
  for (auto it = report.entries.rbegin(); it != report.entries.rend(); ++it)
    if (it->score < tau_eff) candidates.push_back(*it);
  if (candidates.empty()) {
    double min_score = std::numeric_limits<double>::infinity();
    for (const auto& e : report.entries) min_score = std::min(min_score, e.score);
    const CausalityEntry* pick = nullptr;
    for (const auto& e : report.entries)
      if (e.score == min_score && (!pick || e.name < pick->name)) pick = &e;
    candidates.push_back(*pick);
  }

  const std::size_t cap = d - cfg.min_sensors;
  if (candidates.size() > cap) candidates.resize(cap);

  PruneSelection sel;
  for (const auto& e : candidates) sel.remove.push_back(e.name);
  return sel;
}

enum class StopDecision { continue_, degradation, budget, max_iters };

inline const char* to_string(StopDecision d) {
  switch (d) {
    case StopDecision::continue_: return "continue";
    case StopDecision::degradation: return "degradation";
    case StopDecision::budget: return "budget";
    case StopDecision::max_iters: return "max_iters";
  }
  return "continue";
}

// Pure stopping rule over the per-iteration best validation losses.
// `survivors` is the current active channel count, `iters_done` the number
// of completed train iterations.
inline StopDecision stop_check(const std::vector<double>& loss_history,
                               const PruneConfig& cfg, std::size_t survivors,
                               std::size_t iters_done) {
  if (loss_history.empty()) throw data_error("stop_check: empty loss history");
  if (loss_history.size() >= 2) {
    double prior_best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < loss_history.size(); ++i)
      prior_best = std::min(prior_best, loss_history[i]);
    if (loss_history.back() > (1.0 + cfg.degradation_tol) * prior_best)
      return StopDecision::degradation;
  }
  if (survivors <= cfg.min_sensors) return StopDecision::budget;
  if (iters_done >= cfg.max_iters) return StopDecision::max_iters;
  return StopDecision::continue_;
}

struct PruneIteration {
  std::size_t index = 0;
  std::vector<std::string> active;  // channels trained this iteration
  TrainReport train_report;         // report of the seed that won selection
  double val_loss = 0.0;            // best validation loss this iteration
  CausalityReport causality;
  std::vector<std::string> removed;  // empty on the stopping iteration
};

struct PruneTrace {
  std::vector<PruneIteration> iterations;
  std::string stop_reason;  // degradation | budget | max_iters | no_removable
  std::size_t best_iteration = 0;      // argmin of val losses
  std::size_t returned_iteration = 0;  // always the best iteration
  std::vector<std::string> final_channels;
};

// Iterate (train, score, prune, retrain) until degradation, budget,
// max_iters, or nothing removable. Returns the model of the iteration with
// the lowest best validation loss, so a degraded final iteration is never
// returned.
inline std::pair<ObserverModel, PruneTrace> prune_loop(
    const TimeSeriesDataset& ds, const PruneConfig& cfg) {
  validate(cfg);
  validate(ds);
  if (ds.input_dim() < cfg.min_sensors)
    throw data_error("prune_loop: dataset has fewer channels than min_sensors");

  PruneTrace trace;
  std::vector<ObserverModel> models;
  std::vector<double> history;
  std::vector<std::string> active = ds.channel_names();

  for (std::size_t iter = 0;; ++iter) {
    MultiSeedResult msr = multi_seed_train(ds, active, cfg.train_cfg);
    PruneIteration rec;
    rec.index = iter;
    rec.active = active;
    rec.train_report = msr.reports[msr.best_index];
    rec.val_loss = msr.best.best_val_loss;
    rec.causality = causality_report(msr.best, ds, cfg.spec);
    history.push_back(rec.val_loss);
    models.push_back(std::move(msr.best));

    const StopDecision decision =
        stop_check(history, cfg, active.size(), iter + 1);
    if (decision != StopDecision::continue_) {
      trace.iterations.push_back(std::move(rec));
      trace.stop_reason = to_string(decision);
      break;
    }

    const PruneSelection sel = select_prunable(rec.causality, cfg);
    if (sel.no_removable || sel.remove.empty()) {
      trace.iterations.push_back(std::move(rec));
      trace.stop_reason = "no_removable";
      break;
    }
    rec.removed = sel.remove;
    trace.iterations.push_back(std::move(rec));

    std::vector<std::string> next;
    for (const auto& name : active)
      if (std::find(sel.remove.begin(), sel.remove.end(), name) ==
          sel.remove.end())
        next.push_back(name);
    active = std::move(next);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < history.size(); ++i)
    if (history[i] < history[best]) best = i;
  trace.best_iteration = best;
  trace.returned_iteration = best;
  trace.final_channels = models[best].channel_names;
  return {std::move(models[best]), std::move(trace)};
}

}  // namespace ltcprune
