// ltc-prune: generate datasets from the mechanistic testbeds, train LTC
// observers, score per-channel causal influence, prune sensors, and render
// reports. Exit codes: 0 ok, 2 config error, 3 data error, 4 model/data
// mismatch.

#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ltcprune/ltcprune.hpp"

namespace fs = std::filesystem;
using namespace ltcprune;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string manifest_path;  // --from-manifest
  std::string out_dir = ".";
};

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw data_error("cannot create output directory " + dir);
}

// Effective config: --from-manifest wins, then --config, then defaults.
ConfigFile effective_config(const CommonOpts& opts, RunManifest* manifest_in) {
  if (!opts.manifest_path.empty()) {
    *manifest_in = read_manifest(opts.manifest_path);
    return parse_config_text(manifest_in->config_text);
  }
  if (!opts.config_path.empty()) return parse_config_file(opts.config_path);
  return {};
}

std::string arg_or(const std::map<std::string, std::string>& args,
                   const std::string& key, const std::string& fallback) {
  auto it = args.find(key);
  return it == args.end() ? fallback : it->second;
}

std::string meta_path_for(const std::string& csv_path) {
  const std::string suffix = ".csv";
  if (csv_path.size() > suffix.size() &&
      csv_path.compare(csv_path.size() - suffix.size(), suffix.size(), suffix) == 0)
    return csv_path.substr(0, csv_path.size() - suffix.size()) + "_meta.json";
  return csv_path + "_meta.json";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    std::string item = s.substr(pos, comma - pos);
    if (!item.empty()) out.push_back(item);
    pos = comma + 1;
  }
  return out;
}

std::string join_list(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += v[i];
  }
  return out;
}

void finalize_manifest(RunManifest& m, const std::string& command,
                       const std::string& out_dir) {
  m.command = command;
  m.tool_version = kToolVersion;
  m.created = current_timestamp();
  m.run_id = make_run_id(command, m.config_text, m.args);
  const std::string path = join_path(out_dir, command + "_manifest.json");
  m.artifacts["manifest"] = path;
  write_manifest(m, path);
}

// ---------------------------------------------------------------------------

struct GenerateOpts : CommonOpts {
  std::string testbed;  // empty = from config
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int cmd_generate(const GenerateOpts& opts) {
  RunManifest prior;
  const ConfigFile ini = effective_config(opts, &prior);
  DatasetSpec dspec = dataset_spec_from(ini);
  const std::string testbed_arg =
      !opts.testbed.empty() ? opts.testbed
                            : arg_or(prior.args, "testbed", to_string(dspec.testbed));
  dspec.testbed = testbed_from_string(testbed_arg);

  TimeSeriesDataset ds;
  std::string snapshot = render_config(dspec);
  switch (dspec.testbed) {
    case Testbed::mechanical: {
      MechanicalConfig cfg = mechanical_from(ini);
      if (opts.seed_set) cfg.seed = opts.seed;
      ds = generate_dataset(cfg, dspec.n_noise, dspec.split);
      snapshot += render_config(cfg);
      break;
    }
    case Testbed::cstr: {
      CstrConfig cfg = cstr_from(ini);
      if (opts.seed_set) cfg.seed = opts.seed;
      ds = generate_dataset(cfg, dspec.n_noise, dspec.split);
      snapshot += render_config(cfg);
      break;
    }
    case Testbed::predprey: {
      PredPreyConfig cfg = predprey_from(ini);
      if (opts.seed_set) cfg.seed = opts.seed;
      ds = generate_dataset(cfg, dspec.n_noise, dspec.split);
      snapshot += render_config(cfg);
      break;
    }
  }

  ensure_out_dir(opts.out_dir);
  const std::string csv = join_path(opts.out_dir, "dataset.csv");
  const std::string meta = join_path(opts.out_dir, "dataset_meta.json");
  write_dataset(ds, csv, meta);

  RunManifest m;
  m.config_text = snapshot;
  m.args["testbed"] = to_string(dspec.testbed);
  m.artifacts["dataset_csv"] = csv;
  m.artifacts["dataset_meta"] = meta;
  finalize_manifest(m, "generate", opts.out_dir);
  std::cout << "wrote " << csv << " (" << ds.size() << " samples, "
            << ds.input_dim() << " channels)\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct TrainOpts : CommonOpts {
  std::string dataset_path;
  std::string meta_path;
  std::string channels;  // comma list; empty = all
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int cmd_train(const TrainOpts& opts) {
  RunManifest prior;
  const ConfigFile ini = effective_config(opts, &prior);
  TrainConfig tc = train_from(ini);
  if (opts.seed_set) tc.seed = opts.seed;

  const std::string csv =
      !opts.dataset_path.empty() ? opts.dataset_path : arg_or(prior.args, "dataset", "");
  if (csv.empty()) throw config_error("train: --dataset is required");
  const std::string meta = !opts.meta_path.empty()
                               ? opts.meta_path
                               : arg_or(prior.args, "meta", meta_path_for(csv));
  const TimeSeriesDataset ds = read_dataset(csv, meta);

  const std::string channels_arg =
      !opts.channels.empty() ? opts.channels : arg_or(prior.args, "channels", "");
  const std::vector<std::string> channels =
      channels_arg.empty() ? ds.channel_names() : split_list(channels_arg);
  lookup_indices(ds.channel_names(), channels);  // verifies the binding

  const MultiSeedResult msr = multi_seed_train(ds, channels, tc);
  const TrainReport& best_report = msr.reports[msr.best_index];

  ensure_out_dir(opts.out_dir);
  const std::string model_path = join_path(opts.out_dir, "model.json");
  write_model(msr.best, model_path);
  const std::string report_path = join_path(opts.out_dir, "train_report.json");
  write_text_file(report_path, train_report_json_text(best_report));
  const std::string loss_path = join_path(opts.out_dir, "loss_history.csv");
  write_text_file(loss_path, loss_history_csv_text(best_report));

  RunManifest m;
  m.config_text = render_config(tc);
  m.args["dataset"] = csv;
  m.args["meta"] = meta;
  m.args["channels"] = join_list(channels);
  m.artifacts["model"] = model_path;
  m.artifacts["train_report"] = report_path;
  m.artifacts["loss_history"] = loss_path;
  finalize_manifest(m, "train", opts.out_dir);
  std::cout << "trained " << channels.size() << "-input model, best val loss "
            << format_double(best_report.best_val_loss) << " (seed "
            << best_report.seed << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct AnalyzeOpts : CommonOpts {
  std::string model_path;
  std::string dataset_path;
  std::string meta_path;
};

int cmd_analyze(const AnalyzeOpts& opts) {
  RunManifest prior;
  const ConfigFile ini = effective_config(opts, &prior);
  const PerturbationSpec spec = perturbation_from(ini);

  const std::string model_path =
      !opts.model_path.empty() ? opts.model_path : arg_or(prior.args, "model", "");
  if (model_path.empty()) throw config_error("analyze: --model is required");
  const std::string csv =
      !opts.dataset_path.empty() ? opts.dataset_path : arg_or(prior.args, "dataset", "");
  if (csv.empty()) throw config_error("analyze: --dataset is required");
  const std::string meta = !opts.meta_path.empty()
                               ? opts.meta_path
                               : arg_or(prior.args, "meta", meta_path_for(csv));

  const ObserverModel model = read_model(model_path);
  const TimeSeriesDataset ds = read_dataset(csv, meta);
  const CausalityReport report = causality_report(model, ds, spec);

  ensure_out_dir(opts.out_dir);
  const std::string json_path = join_path(opts.out_dir, "causality.json");
  write_text_file(json_path, causality_json_text(report));
  const std::string csv_path = join_path(opts.out_dir, "causality.csv");
  write_text_file(csv_path, causality_csv_text(report));

  std::vector<std::string> labels;
  std::vector<double> scores;
  for (const auto& e : report.entries) {
    labels.push_back(e.name);
    scores.push_back(e.score);
  }
  const std::string chart_path = join_path(opts.out_dir, "causality_scores.svg");
  write_text_file(chart_path,
                  svg_bar_chart("Causality scores", "score", labels, scores));

  RunManifest m;
  m.config_text = render_config(spec);
  m.args["model"] = model_path;
  m.args["dataset"] = csv;
  m.args["meta"] = meta;
  m.artifacts["causality_json"] = json_path;
  m.artifacts["causality_csv"] = csv_path;
  m.artifacts["causality_chart"] = chart_path;
  finalize_manifest(m, "analyze", opts.out_dir);
  for (const auto& e : report.entries)
    std::cout << e.rank << ". " << e.name << "  " << format_double(e.score)
              << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

std::string prune_summary_markdown(const PruneTrace& trace) {
  std::string out = "# Sensor pruning summary\n\n";
  out += "| Iteration | Active sensors | Validation loss | Removed |\n";
  out += "|---|---|---|---|\n";
  for (const auto& it : trace.iterations) {
    out += "| " + std::to_string(it.index) + " | " + join_list(it.active) +
           " | " + format_double(it.val_loss) + " | " +
           (it.removed.empty() ? std::string("-") : join_list(it.removed)) +
           " |\n";
  }
  const auto& best = trace.iterations[trace.best_iteration];
  out += "| final | " + join_list(trace.final_channels) + " | " +
         format_double(best.val_loss) + " | - |\n";
  out += "\nStop reason: " + trace.stop_reason + "; returned iteration " +
         std::to_string(trace.returned_iteration) + ".\n";
  return out;
}

struct PruneOpts : CommonOpts {
  std::string dataset_path;
  std::string meta_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  long long max_iters = -1;
};

int cmd_prune(const PruneOpts& opts) {
  RunManifest prior;
  const ConfigFile ini = effective_config(opts, &prior);
  PruneConfig pc = prune_from(ini);
  if (opts.seed_set) pc.train_cfg.seed = opts.seed;
  if (opts.max_iters >= 0) pc.max_iters = static_cast<std::size_t>(opts.max_iters);

  const std::string csv =
      !opts.dataset_path.empty() ? opts.dataset_path : arg_or(prior.args, "dataset", "");
  if (csv.empty()) throw config_error("prune: --dataset is required");
  const std::string meta = !opts.meta_path.empty()
                               ? opts.meta_path
                               : arg_or(prior.args, "meta", meta_path_for(csv));
  const TimeSeriesDataset ds = read_dataset(csv, meta);

  auto [model, trace] = prune_loop(ds, pc);

  ensure_out_dir(opts.out_dir);
  RunManifest m;
  const std::string model_path = join_path(opts.out_dir, "model.json");
  write_model(model, model_path);
  const std::string trace_path = join_path(opts.out_dir, "prune_trace.json");
  write_text_file(trace_path, prune_trace_json_text(trace));
  const std::string summary_path = join_path(opts.out_dir, "summary.md");
  write_text_file(summary_path, prune_summary_markdown(trace));

  for (const auto& it : trace.iterations) {
    const std::string tag = "iter" + std::to_string(it.index);
    const std::string cj = join_path(opts.out_dir, "causality_" + tag + ".json");
    write_text_file(cj, causality_json_text(it.causality));
    const std::string cc = join_path(opts.out_dir, "causality_" + tag + ".csv");
    write_text_file(cc, causality_csv_text(it.causality));
    const std::string lh = join_path(opts.out_dir, "loss_history_" + tag + ".csv");
    write_text_file(lh, loss_history_csv_text(it.train_report));

    std::vector<std::string> labels;
    std::vector<double> scores;
    for (const auto& e : it.causality.entries) {
      labels.push_back(e.name);
      scores.push_back(e.score);
    }
    const std::string cb = join_path(opts.out_dir, "causality_" + tag + ".svg");
    write_text_file(cb, svg_bar_chart("Causality scores, iteration " +
                                          std::to_string(it.index),
                                      "score", labels, scores));
    ChartSeries train_s{"train", {}, it.train_report.train_loss};
    ChartSeries val_s{"val", {}, it.train_report.val_loss};
    for (std::size_t e = 0; e < it.train_report.train_loss.size(); ++e) {
      train_s.x.push_back(static_cast<double>(e + 1));
      val_s.x.push_back(static_cast<double>(e + 1));
    }
    const std::string lsvg = join_path(opts.out_dir, "loss_" + tag + ".svg");
    write_text_file(lsvg, svg_line_chart("Training loss, iteration " +
                                             std::to_string(it.index),
                                         "epoch", "MSE", {train_s, val_s}));
    m.artifacts["causality_" + tag] = cj;
    m.artifacts["loss_history_" + tag] = lh;
  }

  m.config_text = render_config(pc);
  m.args["dataset"] = csv;
  m.args["meta"] = meta;
  m.artifacts["model"] = model_path;
  m.artifacts["trace"] = trace_path;
  m.artifacts["summary"] = summary_path;
  finalize_manifest(m, "prune", opts.out_dir);
  std::cout << "final sensors: " << join_list(trace.final_channels)
            << " (stop: " << trace.stop_reason << ", val loss "
            << format_double(trace.iterations[trace.best_iteration].val_loss)
            << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct EvaluateOpts : CommonOpts {
  std::string model_path;
  std::string dataset_path;
  std::string meta_path;
  std::string segment = "test";
  std::size_t warmup = 50;
};

int cmd_evaluate(const EvaluateOpts& opts) {
  RunManifest prior;
  effective_config(opts, &prior);  // evaluate has no config sections of its own

  const std::string model_path =
      !opts.model_path.empty() ? opts.model_path : arg_or(prior.args, "model", "");
  if (model_path.empty()) throw config_error("evaluate: --model is required");
  const std::string csv =
      !opts.dataset_path.empty() ? opts.dataset_path : arg_or(prior.args, "dataset", "");
  if (csv.empty()) throw config_error("evaluate: --dataset is required");
  const std::string meta = !opts.meta_path.empty()
                               ? opts.meta_path
                               : arg_or(prior.args, "meta", meta_path_for(csv));
  const Segment segment =
      segment_from_string(arg_or(prior.args, "segment", opts.segment));

  const ObserverModel model = read_model(model_path);
  const TimeSeriesDataset ds = read_dataset(csv, meta);
  const EvalMetrics metrics = evaluate(model, ds, segment, opts.warmup);

  const SegmentRange range = segment_range(ds, segment);
  const Matrix inputs = gather_inputs(ds, model.channel_names, range);
  const ForwardResult fwd = forward(model, inputs);

  ensure_out_dir(opts.out_dir);
  const std::string metrics_path = join_path(opts.out_dir, "metrics.json");
  write_text_file(metrics_path, metrics_json_text(metrics, segment,
                                                  ds.target.meta, opts.warmup));
  const std::string pred_path = join_path(opts.out_dir, "predictions.csv");
  write_text_file(pred_path, predictions_csv_text(ds, segment, fwd.estimates));

  ChartSeries truth_s{"truth", {}, {}};
  ChartSeries pred_s{"prediction", {}, {}};
  for (std::size_t i = 0; i < range.length(); ++i) {
    truth_s.x.push_back(ds.t[range.begin + i]);
    truth_s.y.push_back(ds.target.values[range.begin + i]);
    pred_s.x.push_back(ds.t[range.begin + i]);
    pred_s.y.push_back(fwd.estimates[i]);
  }
  const std::string chart_path = join_path(opts.out_dir, "predictions.svg");
  write_text_file(chart_path,
                  svg_line_chart(std::string("Prediction vs truth (") +
                                     to_string(segment) + ")",
                                 "t", ds.target.meta.name, {truth_s, pred_s}));

  RunManifest m;
  m.args["model"] = model_path;
  m.args["dataset"] = csv;
  m.args["meta"] = meta;
  m.args["segment"] = to_string(segment);
  m.artifacts["metrics"] = metrics_path;
  m.artifacts["predictions"] = pred_path;
  m.artifacts["predictions_chart"] = chart_path;
  finalize_manifest(m, "evaluate", opts.out_dir);
  std::cout << to_string(segment) << " mse " << format_double(metrics.mse)
            << " rmse " << format_double(metrics.rmse) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// report: render charts + summary from whatever artifacts live in a run dir.

struct ReportOpts {
  std::string out_dir = ".";
};

bool try_render_loss_chart(const std::string& dir, const std::string& csv_name,
                           const std::string& svg_name, RunManifest& m) {
  const std::string path = join_path(dir, csv_name);
  if (!fs::exists(path)) return false;
  const auto lines = read_text_file(path);
  ChartSeries train_s{"train", {}, {}};
  ChartSeries val_s{"val", {}, {}};
  std::size_t lineno = 0;
  std::size_t pos = 0;
  bool bad = false;
  while (pos < lines.size()) {
    auto nl = lines.find('\n', pos);
    if (nl == std::string::npos) nl = lines.size();
    const std::string line = lines.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (lineno == 1 || line.empty()) continue;  // header
    const auto cells = split_list(line);
    if (cells.size() != 3) {
      bad = true;
      break;
    }
    char* end = nullptr;
    train_s.x.push_back(std::strtod(cells[0].c_str(), &end));
    val_s.x.push_back(train_s.x.back());
    train_s.y.push_back(std::strtod(cells[1].c_str(), &end));
    val_s.y.push_back(std::strtod(cells[2].c_str(), &end));
  }
  if (bad || train_s.x.empty()) {
    std::cerr << "warning: skipping chart for " << path
              << " (empty or malformed)\n";
    m.warnings += 1;
    return true;
  }
  const std::string out = join_path(dir, svg_name);
  write_text_file(out, svg_line_chart("Training loss", "epoch", "MSE",
                                      {train_s, val_s}));
  m.artifacts[svg_name] = out;
  return true;
}

bool try_render_causality_chart(const std::string& dir,
                                const std::string& csv_name,
                                const std::string& svg_name, RunManifest& m) {
  const std::string path = join_path(dir, csv_name);
  if (!fs::exists(path)) return false;
  const auto text = read_text_file(path);
  std::vector<std::string> labels;
  std::vector<double> scores;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    const auto cells = split_list(line);
    if (cells.size() != 3) continue;
    labels.push_back(cells[0]);
    char* end = nullptr;
    scores.push_back(std::strtod(cells[1].c_str(), &end));
  }
  if (labels.empty()) {
    std::cerr << "warning: skipping chart for " << path << " (no rows)\n";
    m.warnings += 1;
    return true;
  }
  const std::string out = join_path(dir, svg_name);
  write_text_file(out, svg_bar_chart("Causality scores", "score", labels, scores));
  m.artifacts[svg_name] = out;
  return true;
}

int cmd_report(const ReportOpts& opts) {
  const std::string dir = opts.out_dir;
  if (!fs::exists(dir)) throw data_error("report: no such directory: " + dir);
  RunManifest m;
  std::size_t rendered = 0;

  if (try_render_loss_chart(dir, "loss_history.csv", "loss_history.svg", m))
    ++rendered;
  if (try_render_causality_chart(dir, "causality.csv", "causality_scores.svg", m))
    ++rendered;

  const std::string trace_path = join_path(dir, "prune_trace.json");
  if (fs::exists(trace_path)) {
    const auto j = read_json_file(trace_path);
    PruneTrace trace;
    trace.stop_reason = json_get<std::string>(j, "stop_reason");
    trace.best_iteration = json_get<std::size_t>(j, "best_iteration");
    trace.returned_iteration = json_get<std::size_t>(j, "returned_iteration");
    trace.final_channels = json_get<std::vector<std::string>>(j, "final_channels");
    for (const auto& it : json_get<nlohmann::json>(j, "iterations")) {
      PruneIteration rec;
      rec.index = json_get<std::size_t>(it, "iteration");
      rec.active = json_get<std::vector<std::string>>(it, "active");
      rec.val_loss = json_get<double>(it, "val_loss");
      rec.removed = json_get<std::vector<std::string>>(it, "removed");
      trace.iterations.push_back(std::move(rec));
      const std::string tag = "iter" + std::to_string(rec.index);
      try_render_causality_chart(dir, "causality_" + tag + ".csv",
                                 "causality_" + tag + ".svg", m);
      try_render_loss_chart(dir, "loss_history_" + tag + ".csv",
                            "loss_" + tag + ".svg", m);
    }
    const std::string summary_path = join_path(dir, "summary.md");
    write_text_file(summary_path, prune_summary_markdown(trace));
    m.artifacts["summary"] = summary_path;
    ++rendered;
  }

  if (rendered == 0) {
    std::cerr << "warning: no renderable artifacts in " << dir << "\n";
    m.warnings += 1;
  }
  finalize_manifest(m, "report", dir);
  std::cout << "rendered " << rendered << " artifact group(s), " << m.warnings
            << " warning(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LTC observers with causality-guided sensor pruning"};
  app.require_subcommand(1);

  GenerateOpts gen;
  auto* cgen = app.add_subcommand("generate", "simulate a testbed and write a dataset");
  cgen->add_option("--testbed", gen.testbed, "mechanical|cstr|predprey");
  cgen->add_option("--config", gen.config_path, "config file");
  cgen->add_option("--from-manifest", gen.manifest_path, "re-run from a manifest");
  cgen->add_option("--out", gen.out_dir, "output directory");
  cgen->add_option("--seed", gen.seed, "override the simulation seed");

  TrainOpts tr;
  auto* ctr = app.add_subcommand("train", "train an observer on a dataset");
  ctr->add_option("--dataset", tr.dataset_path, "dataset CSV path");
  ctr->add_option("--meta", tr.meta_path, "dataset metadata JSON path");
  ctr->add_option("--channels", tr.channels, "comma-separated input channels");
  ctr->add_option("--config", tr.config_path, "config file");
  ctr->add_option("--from-manifest", tr.manifest_path, "re-run from a manifest");
  ctr->add_option("--out", tr.out_dir, "output directory");
  ctr->add_option("--seed", tr.seed, "override the training base seed");

  AnalyzeOpts an;
  auto* can = app.add_subcommand("analyze", "causality scores for a trained model");
  can->add_option("--model", an.model_path, "model JSON path");
  can->add_option("--dataset", an.dataset_path, "dataset CSV path");
  can->add_option("--meta", an.meta_path, "dataset metadata JSON path");
  can->add_option("--config", an.config_path, "config file");
  can->add_option("--from-manifest", an.manifest_path, "re-run from a manifest");
  can->add_option("--out", an.out_dir, "output directory");

  PruneOpts pr;
  auto* cpr = app.add_subcommand("prune", "iterative causality-guided pruning");
  cpr->add_option("--dataset", pr.dataset_path, "dataset CSV path");
  cpr->add_option("--meta", pr.meta_path, "dataset metadata JSON path");
  cpr->add_option("--config", pr.config_path, "config file");
  cpr->add_option("--from-manifest", pr.manifest_path, "re-run from a manifest");
  cpr->add_option("--out", pr.out_dir, "output directory");
  cpr->add_option("--max-iters", pr.max_iters, "cap on pruning iterations");
  cpr->add_option("--seed", pr.seed, "override the training base seed");

  EvaluateOpts ev;
  auto* cev = app.add_subcommand("evaluate", "metrics + predictions on a segment");
  cev->add_option("--model", ev.model_path, "model JSON path");
  cev->add_option("--dataset", ev.dataset_path, "dataset CSV path");
  cev->add_option("--meta", ev.meta_path, "dataset metadata JSON path");
  cev->add_option("--segment", ev.segment, "train|val|test");
  cev->add_option("--warmup", ev.warmup, "warm-up steps excluded from metrics");
  cev->add_option("--from-manifest", ev.manifest_path, "re-run from a manifest");
  cev->add_option("--out", ev.out_dir, "output directory");

  ReportOpts rp;
  auto* crp = app.add_subcommand("report", "render charts/summary for a run dir");
  crp->add_option("--out", rp.out_dir, "run directory to render into");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are config errors
  }

  gen.seed_set = cgen->count("--seed") > 0;
  tr.seed_set = ctr->count("--seed") > 0;
  pr.seed_set = cpr->count("--seed") > 0;

  try {
    if (cgen->parsed()) return cmd_generate(gen);
    if (ctr->parsed()) return cmd_train(tr);
    if (can->parsed()) return cmd_analyze(an);
    if (cpr->parsed()) return cmd_prune(pr);
    if (cev->parsed()) return cmd_evaluate(ev);
    if (crp->parsed()) return cmd_report(rp);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mismatch_error& e) {
    std::cerr << "model/data mismatch: " << e.what() << "\n";
    return 4;
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
