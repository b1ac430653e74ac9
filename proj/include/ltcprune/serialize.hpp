#pragma once

// Artifact readers/writers. All floats go out at 17 significant digits so
// write -> read -> write round-trips byte-exactly.

#include <cstdlib>
#include <string>
#include <vector>

#include "ltcprune/causality.hpp"
#include "ltcprune/dataset.hpp"
#include "ltcprune/errors.hpp"
#include "ltcprune/jsonio.hpp"
#include "ltcprune/ltc.hpp"
#include "ltcprune/pruner.hpp"
#include "ltcprune/training.hpp"
#include "ltcprune/version.hpp"

namespace ltcprune {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    if (comma == std::string::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

inline double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw data_error(where + ": not a number: '" + s + "'");
  return v;
}

inline std::vector<std::string> read_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    pos = nl + 1;
  }
  return lines;
}

}  // namespace detail

// --------------------------------------------------------------------------
// Dataset: CSV (t, channels..., target) + metadata JSON.

inline std::string dataset_csv_text(const TimeSeriesDataset& ds) {
  std::string out = "t";
  for (const auto& c : ds.channels) {
    out += ',';
    out += c.meta.name;
  }
  out += ',';
  out += ds.target.meta.name;
  out += '\n';
  for (std::size_t n = 0; n < ds.size(); ++n) {
    out += format_double(ds.t[n]);
    for (const auto& c : ds.channels) {
      out += ',';
      out += format_double(c.values[n]);
    }
    out += ',';
    out += format_double(ds.target.values[n]);
    out += '\n';
  }
  return out;
}

inline JNode channel_meta_node(const ChannelMeta& m) {
  JNode n = JNode::obj();
  n.add("name", JNode::s(m.name));
  n.add("mu", JNode::d(m.mu));
  n.add("sigma", JNode::d(m.sigma));
  n.add("kind", JNode::s(to_string(m.kind)));
  return n;
}

inline std::string dataset_meta_text(const TimeSeriesDataset& ds) {
  JNode root = JNode::obj();
  root.add("schema_version", JNode::i(kSchemaVersion));
  root.add("n_samples", JNode::u(ds.size()));
  root.add("train_end", JNode::u(ds.train_end));
  root.add("val_end", JNode::u(ds.val_end));
  JNode chans = JNode::arr();
  for (const auto& c : ds.channels) chans.push(channel_meta_node(c.meta));
  root.add("channels", std::move(chans));
  root.add("target", channel_meta_node(ds.target.meta));
  return dump_json(root);
}

inline void write_dataset(const TimeSeriesDataset& ds,
                          const std::string& csv_path,
                          const std::string& meta_path) {
  write_text_file(csv_path, dataset_csv_text(ds));
  write_text_file(meta_path, dataset_meta_text(ds));
}

inline ChannelMeta channel_meta_from_json(const nlohmann::json& j) {
  ChannelMeta m;
  m.name = json_get<std::string>(j, "name");
  m.mu = json_get<double>(j, "mu");
  m.sigma = json_get<double>(j, "sigma");
  m.kind = channel_kind_from_string(json_get<std::string>(j, "kind"));
  return m;
}

inline TimeSeriesDataset read_dataset(const std::string& csv_path,
                                      const std::string& meta_path) {
  // Read the CSV first so a missing dataset names the dataset path, not the
  // companion metadata file.
  const auto lines = detail::read_lines(read_text_file(csv_path));
  const auto meta = read_json_file(meta_path);
  TimeSeriesDataset ds;
  ds.train_end = json_get<std::size_t>(meta, "train_end");
  ds.val_end = json_get<std::size_t>(meta, "val_end");
  const auto n_samples = json_get<std::size_t>(meta, "n_samples");
  if (!meta.contains("channels") || !meta["channels"].is_array())
    throw data_error(meta_path + ": missing channels array");
  for (const auto& cj : meta["channels"])
    ds.channels.push_back(Channel{channel_meta_from_json(cj), {}});
  ds.target.meta = channel_meta_from_json(json_get<nlohmann::json>(meta, "target"));

  if (lines.empty()) throw data_error(csv_path + ": empty file");
  const auto header = detail::split_csv_line(lines[0]);
  if (header.size() != ds.channels.size() + 2 || header[0] != "t")
    throw data_error(csv_path + ": header does not match metadata");
  for (std::size_t c = 0; c < ds.channels.size(); ++c)
    if (header[c + 1] != ds.channels[c].meta.name)
      throw data_error(csv_path + ": column '" + header[c + 1] +
                       "' does not match metadata channel '" +
                       ds.channels[c].meta.name + "'");
  if (header.back() != ds.target.meta.name)
    throw data_error(csv_path + ": target column mismatch");

  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    const auto cells = detail::split_csv_line(lines[r]);
    if (cells.size() != header.size())
      throw data_error(csv_path + ": row " + std::to_string(r) +
                       " has wrong column count");
    const std::string where = csv_path + ":" + std::to_string(r + 1);
    ds.t.push_back(detail::parse_double(cells[0], where));
    for (std::size_t c = 0; c < ds.channels.size(); ++c)
      ds.channels[c].values.push_back(detail::parse_double(cells[c + 1], where));
    ds.target.values.push_back(detail::parse_double(cells.back(), where));
  }
  if (ds.size() != n_samples)
    throw data_error(csv_path + ": row count disagrees with metadata");
  validate(ds);
  return ds;
}

// --------------------------------------------------------------------------
// Model JSON.

inline std::string model_json_text(const ObserverModel& m) {
  JNode root = JNode::obj();
  root.add("schema_version", JNode::i(kSchemaVersion));
  root.add("hidden_size", JNode::u(m.hidden_size));
  root.add("dt", JNode::d(m.dt));
  root.add("seed", JNode::u(m.seed));
  root.add("channel_names", JNode::svec(m.channel_names));
  root.add("epochs_run", JNode::u(m.epochs_run));
  root.add("best_val_loss", JNode::d(m.best_val_loss));
  JNode params = JNode::obj();
  params.add("tau_raw", JNode::dvec(m.params.tau_raw));
  params.add("b", JNode::dvec(m.params.b));
  params.add("w_rec", JNode::dvec(m.params.w_rec.data));
  params.add("w_in", JNode::dvec(m.params.w_in.data));
  params.add("readout_w", JNode::dvec(m.params.readout_w));
  params.add("readout_b", JNode::d(m.params.readout_b));
  root.add("params", std::move(params));
  return dump_json(root);
}

inline void write_model(const ObserverModel& m, const std::string& path) {
  write_text_file(path, model_json_text(m));
}

inline ObserverModel read_model(const std::string& path) {
  const auto j = read_json_file(path);
  if (json_get<int>(j, "schema_version") != kSchemaVersion)
    throw data_error(path + ": unsupported schema_version");
  ObserverModel m;
  m.hidden_size = json_get<std::size_t>(j, "hidden_size");
  m.dt = json_get<double>(j, "dt");
  m.seed = json_get<std::uint64_t>(j, "seed");
  m.channel_names = json_get<std::vector<std::string>>(j, "channel_names");
  m.epochs_run = json_get<std::size_t>(j, "epochs_run");
  m.best_val_loss = json_get<double>(j, "best_val_loss");
  const auto p = json_get<nlohmann::json>(j, "params");
  const std::size_t H = m.hidden_size;
  const std::size_t d = m.channel_names.size();
  m.params.tau_raw = json_get<std::vector<double>>(p, "tau_raw");
  m.params.b = json_get<std::vector<double>>(p, "b");
  m.params.w_rec = Matrix(H, H);
  m.params.w_rec.data = json_get<std::vector<double>>(p, "w_rec");
  m.params.w_in = Matrix(H, d);
  m.params.w_in.data = json_get<std::vector<double>>(p, "w_in");
  m.params.readout_w = json_get<std::vector<double>>(p, "readout_w");
  m.params.readout_b = json_get<double>(p, "readout_b");
  if (m.params.w_rec.data.size() != H * H || m.params.w_in.data.size() != H * d)
    throw data_error(path + ": parameter array sizes disagree with shapes");
  validate(m);
  return m;
}

// --------------------------------------------------------------------------
// Train report.

inline std::string train_report_json_text(const TrainReport& r) {
  JNode root = JNode::obj();
  root.add("schema_version", JNode::i(kSchemaVersion));
  root.add("seed", JNode::u(r.seed));
  root.add("epochs_run", JNode::u(r.epochs_run));
  root.add("best_epoch", JNode::u(r.best_epoch));
  root.add("best_val_loss", JNode::d(r.best_val_loss));
  root.add("stop_reason", JNode::s(r.stop_reason));
  root.add("warmup_in_windows", JNode::b(r.warmup_in_windows));
  root.add("train_loss", JNode::dvec(r.train_loss));
  root.add("val_loss", JNode::dvec(r.val_loss));
  return dump_json(root);
}

inline std::string loss_history_csv_text(const TrainReport& r) {
  std::string out = "epoch,train_loss,val_loss\n";
  for (std::size_t e = 0; e < r.train_loss.size(); ++e) {
    out += std::to_string(e + 1);
    out += ',';
    out += format_double(r.train_loss[e]);
    out += ',';
    out += format_double(r.val_loss[e]);
    out += '\n';
  }
  return out;
}

// --------------------------------------------------------------------------
// Causality report.

inline JNode causality_report_node(const CausalityReport& r) {
  JNode root = JNode::obj();
  root.add("schema_version", JNode::i(kSchemaVersion));
  root.add("model_seed", JNode::u(r.model_seed));
  root.add("hidden_size", JNode::u(r.hidden_size));
  root.add("forward_passes", JNode::u(r.forward_passes));
  JNode spec = JNode::obj();
  spec.add("epsilon", JNode::d(r.spec.epsilon));
  spec.add("window_start", JNode::u(r.spec.window_start));
  spec.add("window_len", JNode::u(r.spec.window_len));
  spec.add("segment", JNode::s(to_string(r.spec.segment)));
  root.add("spec", std::move(spec));
  JNode entries = JNode::arr();
  for (const auto& e : r.entries) {
    JNode en = JNode::obj();
    en.add("name", JNode::s(e.name));
    en.add("score", JNode::d(e.score));
    en.add("rank", JNode::u(e.rank));
    entries.push(std::move(en));
  }
  root.add("entries", std::move(entries));
  return root;
}

inline std::string causality_json_text(const CausalityReport& r) {
  return dump_json(causality_report_node(r));
}

inline std::string causality_csv_text(const CausalityReport& r) {
  std::string out = "name,score,rank\n";
  for (const auto& e : r.entries) {
    out += e.name;
    out += ',';
    out += format_double(e.score);
    out += ',';
    out += std::to_string(e.rank);
    out += '\n';
  }
  return out;
}

// --------------------------------------------------------------------------
// Prune trace.

inline std::string prune_trace_json_text(const PruneTrace& t) {
  JNode root = JNode::obj();
  root.add("schema_version", JNode::i(kSchemaVersion));
  root.add("stop_reason", JNode::s(t.stop_reason));
  root.add("best_iteration", JNode::u(t.best_iteration));
  root.add("returned_iteration", JNode::u(t.returned_iteration));
  root.add("final_channels", JNode::svec(t.final_channels));
  JNode iters = JNode::arr();
  for (const auto& it : t.iterations) {
    JNode n = JNode::obj();
    n.add("iteration", JNode::u(it.index));
    n.add("active", JNode::svec(it.active));
    n.add("val_loss", JNode::d(it.val_loss));
    n.add("removed", JNode::svec(it.removed));
    n.add("train_seed", JNode::u(it.train_report.seed));
    n.add("train_epochs", JNode::u(it.train_report.epochs_run));
    n.add("train_stop_reason", JNode::s(it.train_report.stop_reason));
    n.add("causality", causality_report_node(it.causality));
    iters.push(std::move(n));
  }
  root.add("iterations", std::move(iters));
  return dump_json(root);
}

// --------------------------------------------------------------------------
// Evaluation artifacts.

inline std::string metrics_json_text(const EvalMetrics& m, Segment segment,
                                     const ChannelMeta& target,
                                     std::size_t warmup) {
  JNode root = JNode::obj();
  root.add("schema_version", JNode::i(kSchemaVersion));
  root.add("segment", JNode::s(to_string(segment)));
  root.add("warmup_steps", JNode::u(warmup));
  root.add("target", JNode::s(target.name));
  root.add("mse", JNode::d(m.mse));
  root.add("rmse", JNode::d(m.rmse));
  // De-standardized via the stored channel scale.
  root.add("mse_destandardized", JNode::d(m.mse * target.sigma * target.sigma));
  root.add("rmse_destandardized", JNode::d(m.rmse * target.sigma));
  return dump_json(root);
}

// Aligned truth/prediction trace over one segment, both in standardized and
// original units.
inline std::string predictions_csv_text(const TimeSeriesDataset& ds,
                                        Segment segment,
                                        const std::vector<double>& estimates) {
  const SegmentRange range = segment_range(ds, segment);
  if (estimates.size() != range.length())
    throw mismatch_error("predictions_csv: estimate length mismatch");
  const ChannelMeta& tm = ds.target.meta;
  std::string out = "t,truth,prediction,truth_raw,prediction_raw\n";
  for (std::size_t i = 0; i < range.length(); ++i) {
    const std::size_t n = range.begin + i;
    const double truth = ds.target.values[n];
    const double pred = estimates[i];
    out += format_double(ds.t[n]);
    out += ',';
    out += format_double(truth);
    out += ',';
    out += format_double(pred);
    out += ',';
    out += format_double(truth * tm.sigma + tm.mu);
    out += ',';
    out += format_double(pred * tm.sigma + tm.mu);
    out += '\n';
  }
  return out;
}

}  // namespace ltcprune
