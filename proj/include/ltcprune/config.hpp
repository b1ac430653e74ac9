#pragma once

#include <cstdint>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ltcprune/causality.hpp"
#include "ltcprune/errors.hpp"
#include "ltcprune/jsonio.hpp"
#include "ltcprune/numeric.hpp"
#include "ltcprune/pruner.hpp"
#include "ltcprune/testbeds.hpp"
#include "ltcprune/training.hpp"

namespace ltcprune {

// key = value lines under [section] headers; '#' and ';' start comments.
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section) const { return sections.count(section) != 0; }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

inline ConfigFile parse_config_text(const std::string& text) {
  ConfigFile cfg;
  std::string section;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("config line " + std::to_string(lineno) +
                           ": unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw config_error("config line " + std::to_string(lineno) +
                           ": empty section name");
      cfg.sections[section];  // section may legitimately stay empty
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) +
                         ": expected key = value");
    if (section.empty())
      throw config_error("config line " + std::to_string(lineno) +
                         ": key outside any [section]");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty())
      throw config_error("config line " + std::to_string(lineno) + ": empty key");
    auto& sec = cfg.sections[section];
    if (!sec.emplace(key, value).second)
      throw config_error("config: duplicate key '" + section + "." + key + "'");
  }
  return cfg;
}

inline ConfigFile parse_config_file(const std::string& path) {
  return parse_config_text(read_text_file(path));
}

// Typed access to one section; finish() rejects unrecognized keys so typos
// fail loudly instead of silently using defaults.
class SectionReader {
 public:
  SectionReader(const ConfigFile& cfg, std::string section)
      : section_(std::move(section)) {
    auto it = cfg.sections.find(section_);
    kv_ = it == cfg.sections.end() ? nullptr : &it->second;
  }

  double get_double(const std::string& key, double def) {
    const std::string* raw = fetch(key);
    if (!raw) return def;
    char* end = nullptr;
    const double v = std::strtod(raw->c_str(), &end);
    if (end == raw->c_str() || *end != '\0')
      throw config_error("config: " + section_ + "." + key +
                         " is not a number: '" + *raw + "'");
    return v;
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t def) {
    const std::string* raw = fetch(key);
    if (!raw) return def;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw->c_str(), &end, 10);
    if (end == raw->c_str() || *end != '\0')
      throw config_error("config: " + section_ + "." + key +
                         " is not a non-negative integer: '" + *raw + "'");
    return v;
  }

  std::size_t get_size(const std::string& key, std::size_t def) {
    return static_cast<std::size_t>(get_u64(key, def));
  }

  std::string get_string(const std::string& key, const std::string& def) {
    const std::string* raw = fetch(key);
    return raw ? *raw : def;
  }

  void finish() const {
    if (!kv_) return;
    for (const auto& [key, value] : *kv_)
      if (!consumed_.count(key))
        throw config_error("config: unknown key '" + section_ + "." + key + "'");
  }

 private:
  const std::string* fetch(const std::string& key) {
    consumed_.insert(key);
    if (!kv_) return nullptr;
    auto it = kv_->find(key);
    return it == kv_->end() ? nullptr : &it->second;
  }

  const std::map<std::string, std::string>* kv_ = nullptr;
  std::string section_;
  std::set<std::string> consumed_;
};

// ---------------------------------------------------------------------------
// Section loaders. Absent sections/keys fall back to the documented defaults.

struct DatasetSpec {
  Testbed testbed = Testbed::mechanical;
  std::size_t n_noise = 3;
  SplitSpec split;
};

inline DatasetSpec dataset_spec_from(const ConfigFile& cfg) {
  SectionReader r(cfg, "dataset");
  DatasetSpec spec;
  spec.testbed = testbed_from_string(r.get_string("testbed", "mechanical"));
  spec.n_noise = r.get_size("n_noise", 3);
  spec.split.train_frac = r.get_double("train_frac", 0.8);
  spec.split.val_frac_of_train = r.get_double("val_frac_of_train", 0.2);
  spec.split.warmup = r.get_size("warmup", 50);
  r.finish();
  return spec;
}

inline MechanicalConfig mechanical_from(const ConfigFile& cfg) {
  SectionReader r(cfg, "mechanical");
  MechanicalConfig c;
  c.m = r.get_double("m", c.m);
  c.c = r.get_double("c", c.c);
  c.k = r.get_double("k", c.k);
  c.x0 = r.get_double("x0", c.x0);
  c.v0 = r.get_double("v0", c.v0);
  c.force_amplitude = r.get_double("force_amplitude", c.force_amplitude);
  c.force_cutoff = r.get_double("force_cutoff", c.force_cutoff);
  c.duration = r.get_double("duration", c.duration);
  c.dt = r.get_double("dt", c.dt);
  c.seed = r.get_u64("seed", c.seed);
  r.finish();
  return c;
}

inline CstrConfig cstr_from(const ConfigFile& cfg) {
  SectionReader r(cfg, "cstr");
  CstrConfig c;
  c.f_out = r.get_double("f_out", c.f_out);
  c.c_a_in = r.get_double("c_a_in", c.c_a_in);
  c.k_rate = r.get_double("k_rate", c.k_rate);
  c.v0 = r.get_double("v0", c.v0);
  c.c_a0 = r.get_double("c_a0", c.c_a0);
  c.inflow_mean = r.get_double("inflow_mean", c.inflow_mean);
  c.inflow_noise = r.get_double("inflow_noise", c.inflow_noise);
  c.inflow_cutoff = r.get_double("inflow_cutoff", c.inflow_cutoff);
  c.duration = r.get_double("duration", c.duration);
  c.dt = r.get_double("dt", c.dt);
  c.seed = r.get_u64("seed", c.seed);
  r.finish();
  return c;
}

inline PredPreyConfig predprey_from(const ConfigFile& cfg) {
  SectionReader r(cfg, "predprey");
  PredPreyConfig c;
  c.alpha_base = r.get_double("alpha_base", c.alpha_base);
  c.alpha_amp = r.get_double("alpha_amp", c.alpha_amp);
  c.alpha_period = r.get_double("alpha_period", c.alpha_period);
  c.alpha_noise = r.get_double("alpha_noise", c.alpha_noise);
  c.alpha_noise_cutoff = r.get_double("alpha_noise_cutoff", c.alpha_noise_cutoff);
  c.beta = r.get_double("beta", c.beta);
  c.delta = r.get_double("delta", c.delta);
  c.gamma = r.get_double("gamma", c.gamma);
  c.prey0 = r.get_double("prey0", c.prey0);
  c.pred0 = r.get_double("pred0", c.pred0);
  c.duration = r.get_double("duration", c.duration);
  c.dt = r.get_double("dt", c.dt);
  c.seed = r.get_u64("seed", c.seed);
  r.finish();
  return c;
}

inline TrainConfig train_from(const ConfigFile& cfg) {
  SectionReader r(cfg, "train");
  TrainConfig c;
  c.lr = r.get_double("lr", c.lr);
  c.max_epochs = r.get_size("max_epochs", c.max_epochs);
  c.clip_norm = r.get_double("clip_norm", c.clip_norm);
  c.patience = r.get_size("patience", c.patience);
  c.warmup_steps = r.get_size("warmup_steps", c.warmup_steps);
  c.window_len = r.get_size("window_len", c.window_len);
  c.window_stride = r.get_size("window_stride", c.window_stride);
  c.n_seeds = r.get_size("n_seeds", c.n_seeds);
  c.hidden_size = r.get_size("hidden_size", c.hidden_size);
  c.seed = r.get_u64("seed", c.seed);
  r.finish();
  return c;
}

inline PerturbationSpec perturbation_from(const ConfigFile& cfg) {
  SectionReader r(cfg, "perturbation");
  PerturbationSpec s;
  s.epsilon = r.get_double("epsilon", s.epsilon);
  s.window_start = r.get_size("window_start", s.window_start);
  s.window_len = r.get_size("window_len", s.window_len);
  s.segment = segment_from_string(r.get_string("segment", to_string(s.segment)));
  r.finish();
  return s;
}

inline PruneConfig prune_from(const ConfigFile& cfg) {
  SectionReader r(cfg, "prune");
  PruneConfig c;
  c.threshold_mode =
      threshold_mode_from_string(r.get_string("threshold_mode", to_string(c.threshold_mode)));
  c.threshold_tau = r.get_double("threshold_tau", c.threshold_tau);
  c.degradation_tol = r.get_double("degradation_tol", c.degradation_tol);
  c.min_sensors = r.get_size("min_sensors", c.min_sensors);
  c.max_iters = r.get_size("max_iters", c.max_iters);
  r.finish();
  c.spec = perturbation_from(cfg);
  c.train_cfg = train_from(cfg);
  return c;
}

// ---------------------------------------------------------------------------
// Canonical rendering: every effective value, fixed key order, %.17g floats.
// The manifest embeds this text, so reruns reparse to identical configs.

namespace detail {

inline void put(std::string& out, const std::string& key, double v) {
  out += key;
  out += " = ";
  out += format_double(v);
  out += '\n';
}
inline void put(std::string& out, const std::string& key, std::uint64_t v) {
  out += key;
  out += " = ";
  out += std::to_string(v);
  out += '\n';
}
inline void put(std::string& out, const std::string& key, const char* v) {
  out += key;
  out += " = ";
  out += v;
  out += '\n';
}

}  // namespace detail

inline std::string render_config(const DatasetSpec& s) {
  std::string out = "[dataset]\n";
  detail::put(out, "testbed", to_string(s.testbed));
  detail::put(out, "n_noise", s.n_noise);
  detail::put(out, "train_frac", s.split.train_frac);
  detail::put(out, "val_frac_of_train", s.split.val_frac_of_train);
  detail::put(out, "warmup", s.split.warmup);
  return out;
}

inline std::string render_config(const MechanicalConfig& c) {
  std::string out = "[mechanical]\n";
  detail::put(out, "m", c.m);
  detail::put(out, "c", c.c);
  detail::put(out, "k", c.k);
  detail::put(out, "x0", c.x0);
  detail::put(out, "v0", c.v0);
  detail::put(out, "force_amplitude", c.force_amplitude);
  detail::put(out, "force_cutoff", c.force_cutoff);
  detail::put(out, "duration", c.duration);
  detail::put(out, "dt", c.dt);
  detail::put(out, "seed", c.seed);
  return out;
}

inline std::string render_config(const CstrConfig& c) {
  std::string out = "[cstr]\n";
  detail::put(out, "f_out", c.f_out);
  detail::put(out, "c_a_in", c.c_a_in);
  detail::put(out, "k_rate", c.k_rate);
  detail::put(out, "v0", c.v0);
  detail::put(out, "c_a0", c.c_a0);
  detail::put(out, "inflow_mean", c.inflow_mean);
  detail::put(out, "inflow_noise", c.inflow_noise);
  detail::put(out, "inflow_cutoff", c.inflow_cutoff);
  detail::put(out, "duration", c.duration);
  detail::put(out, "dt", c.dt);
  detail::put(out, "seed", c.seed);
  return out;
}

inline std::string render_config(const PredPreyConfig& c) {
  std::string out = "[predprey]\n";
  detail::put(out, "alpha_base", c.alpha_base);
  detail::put(out, "alpha_amp", c.alpha_amp);
  detail::put(out, "alpha_period", c.alpha_period);
  detail::put(out, "alpha_noise", c.alpha_noise);
  detail::put(out, "alpha_noise_cutoff", c.alpha_noise_cutoff);
  detail::put(out, "beta", c.beta);
  detail::put(out, "delta", c.delta);
  detail::put(out, "gamma", c.gamma);
  detail::put(out, "prey0", c.prey0);
  detail::put(out, "pred0", c.pred0);
  detail::put(out, "duration", c.duration);
  detail::put(out, "dt", c.dt);
  detail::put(out, "seed", c.seed);
  return out;
}

inline std::string render_config(const TrainConfig& c) {
  std::string out = "[train]\n";
  detail::put(out, "lr", c.lr);
  detail::put(out, "max_epochs", c.max_epochs);
  detail::put(out, "clip_norm", c.clip_norm);
  detail::put(out, "patience", c.patience);
  detail::put(out, "warmup_steps", c.warmup_steps);
  detail::put(out, "window_len", c.window_len);
  detail::put(out, "window_stride", c.window_stride);
  detail::put(out, "n_seeds", c.n_seeds);
  detail::put(out, "hidden_size", c.hidden_size);
  detail::put(out, "seed", c.seed);
  return out;
}

inline std::string render_config(const PerturbationSpec& s) {
  std::string out = "[perturbation]\n";
  detail::put(out, "epsilon", s.epsilon);
  detail::put(out, "window_start", s.window_start);
  detail::put(out, "window_len", s.window_len);
  detail::put(out, "segment", to_string(s.segment));
  return out;
}

inline std::string render_config(const PruneConfig& c) {
  std::string out = "[prune]\n";
  detail::put(out, "threshold_mode", to_string(c.threshold_mode));
  detail::put(out, "threshold_tau", c.threshold_tau);
  detail::put(out, "degradation_tol", c.degradation_tol);
  detail::put(out, "min_sensors", c.min_sensors);
  detail::put(out, "max_iters", c.max_iters);
  out += render_config(c.spec);
  out += render_config(c.train_cfg);
  return out;
}

}  // namespace ltcprune
