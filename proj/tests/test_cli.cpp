// End-to-end tests that shell out to the ltc-prune binary. The binary path
// arrives via the LTC_PRUNE_BIN compile definition.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ltcprune/ltcprune.hpp"

namespace fs = std::filesystem;
using namespace ltcprune;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  static const std::string bin = LTC_PRUNE_BIN;
  const std::string out_file = (fs::temp_directory_path() / "cli_out.txt").string();
  const std::string err_file = (fs::temp_directory_path() / "cli_err.txt").string();
  const std::string cmd = bin + " " + args + " > " + out_file + " 2> " + err_file;
  const int rc = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

std::string fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("ltcprune_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

// [train]/[prune] settings small enough that a prune run takes seconds.
const char* kTinyConfig =
    "[mechanical]\n"
    "duration = 30\n"
    "[train]\n"
    "hidden_size = 4\n"
    "max_epochs = 5\n"
    "n_seeds = 1\n"
    "window_len = 64\n"
    "window_stride = 32\n"
    "warmup_steps = 10\n"
    "[perturbation]\n"
    "window_start = 10\n";

std::string write_tiny_config(const std::string& dir) {
  const std::string path = (fs::path(dir) / "tiny.ini").string();
  write_text_file(path, kTinyConfig);
  return path;
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

// A dataset whose target is identically zero, plus a model that outputs
// exactly zero: predictions match the target bit-for-bit.
void write_zero_task(const std::string& dir, std::string* csv,
                     std::string* meta, std::string* model_path) {
  TimeSeriesDataset ds;
  const std::size_t n = 260;  // test segment must outlast the 50-step warm-up
  ds.t.resize(n);
  for (std::size_t i = 0; i < n; ++i) ds.t[i] = 0.05 * static_cast<double>(i);
  Channel u;
  u.meta.name = "u";
  auto s = standardize(smoothed_noise(n, 0.1, 3));
  u.values = s.values;
  ds.channels.push_back(u);
  ds.target.meta.name = "y";
  ds.target.values.assign(n, 0.0);
  ds.train_end = 120;
  ds.val_end = 180;
  *csv = (fs::path(dir) / "zero.csv").string();
  *meta = (fs::path(dir) / "zero_meta.json").string();
  write_dataset(ds, *csv, *meta);

  ObserverModel m;
  m.hidden_size = 2;
  m.channel_names = {"u"};
  m.params = init_params(2, 1, 1);
  for (auto& w : m.params.readout_w) w = 0.0;
  m.params.readout_b = 0.0;
  m.dt = 0.05;
  m.seed = 1;
  m.epochs_run = 1;
  m.best_val_loss = 0.0;
  *model_path = (fs::path(dir) / "zero_model.json").string();
  write_model(m, *model_path);
}

}  // namespace

TEST_CASE("generate writes the documented mechanical channel set") {
  const auto dir = fresh_dir("gen_mech");
  const auto r = run_cli("generate --testbed mechanical --out " + dir);
  INFO(r.err);
  REQUIRE(r.exit_code == 0);
  const auto csv = slurp(dir + "/dataset.csv");
  CHECK(first_line(csv) == "t,F,x,F_x_interaction,noise1,noise2,noise3,xdot");
  CHECK(fs::exists(dir + "/dataset_meta.json"));
  CHECK(fs::exists(dir + "/generate_manifest.json"));
}

TEST_CASE("generate rejects an unknown testbed with exit 2") {
  const auto dir = fresh_dir("gen_bad");
  const auto r = run_cli("generate --testbed reactor --out " + dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("reactor") != std::string::npos);
}

TEST_CASE("bad flags and unknown subcommands exit 2") {
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("generate --no-such-flag").exit_code == 2);
  CHECK(run_cli("").exit_code == 2);  // a subcommand is required
}

TEST_CASE("generate rerun from its manifest is byte-identical") {
  const auto dir_a = fresh_dir("gen_a");
  const auto config = write_tiny_config(dir_a);
  const auto ra =
      run_cli("generate --config " + config + " --seed 9 --out " + dir_a);
  INFO(ra.err);
  REQUIRE(ra.exit_code == 0);

  const auto dir_b = fresh_dir("gen_b");
  const auto rb = run_cli("generate --from-manifest " + dir_a +
                          "/generate_manifest.json --out " + dir_b);
  INFO(rb.err);
  REQUIRE(rb.exit_code == 0);
  const auto csv_a = slurp(dir_a + "/dataset.csv");
  const auto csv_b = slurp(dir_b + "/dataset.csv");
  REQUIRE(!csv_a.empty());
  CHECK(csv_a == csv_b);
  CHECK(slurp(dir_a + "/dataset_meta.json") == slurp(dir_b + "/dataset_meta.json"));
}

TEST_CASE("train produces a model and loss history on a tiny dataset") {
  const auto dir = fresh_dir("train_tiny");
  const auto config = write_tiny_config(dir);
  REQUIRE(run_cli("generate --config " + config + " --out " + dir).exit_code == 0);
  const auto r = run_cli("train --config " + config + " --dataset " + dir +
                         "/dataset.csv --channels F,x --out " + dir);
  INFO(r.err);
  REQUIRE(r.exit_code == 0);
  REQUIRE(fs::exists(dir + "/model.json"));
  const auto model = read_model(dir + "/model.json");
  CHECK(model.channel_names == std::vector<std::string>{"F", "x"});
  CHECK(model.hidden_size == 4);
  const auto loss_csv = slurp(dir + "/loss_history.csv");
  CHECK(first_line(loss_csv) == "epoch,train_loss,val_loss");
  const auto report = nlohmann::json::parse(slurp(dir + "/train_report.json"));
  CHECK(report["epochs_run"] == 5);
}

TEST_CASE("train on a missing dataset exits 3 and names the path") {
  const auto dir = fresh_dir("train_missing");
  const auto r =
      run_cli("train --dataset " + dir + "/absent.csv --out " + dir);
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("absent.csv") != std::string::npos);
}

TEST_CASE("analyze emits causality artifacts for a trained model") {
  const auto dir = fresh_dir("analyze");
  const auto config = write_tiny_config(dir);
  REQUIRE(run_cli("generate --config " + config + " --out " + dir).exit_code == 0);
  REQUIRE(run_cli("train --config " + config + " --dataset " + dir +
                  "/dataset.csv --out " + dir)
              .exit_code == 0);
  const auto r = run_cli("analyze --config " + config + " --model " + dir +
                         "/model.json --dataset " + dir + "/dataset.csv --out " +
                         dir);
  INFO(r.err);
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(slurp(dir + "/causality.json"));
  CHECK(j["entries"].size() == 6);  // F, x, interaction, 3 noise channels
  const auto csv = slurp(dir + "/causality.csv");
  CHECK(first_line(csv) == "name,score,rank");
  CHECK(fs::exists(dir + "/causality_scores.svg"));
}

TEST_CASE("prune with --max-iters 1 leaves exactly the iteration-0 record") {
  const auto dir = fresh_dir("prune_cap");
  const auto config = write_tiny_config(dir);
  REQUIRE(run_cli("generate --config " + config + " --out " + dir).exit_code == 0);
  const auto r = run_cli("prune --config " + config + " --dataset " + dir +
                         "/dataset.csv --max-iters 1 --out " + dir);
  INFO(r.err);
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(slurp(dir + "/prune_trace.json"));
  REQUIRE(j["iterations"].size() == 1);
  CHECK(j["iterations"][0]["iteration"] == 0);
  CHECK(j["stop_reason"] == "max_iters");
  CHECK(fs::exists(dir + "/model.json"));
  CHECK(fs::exists(dir + "/summary.md"));
  CHECK(fs::exists(dir + "/causality_iter0.svg"));
  CHECK(fs::exists(dir + "/loss_iter0.svg"));
  const auto summary = slurp(dir + "/summary.md");
  CHECK(summary.find("| Iteration |") != std::string::npos);
  CHECK(summary.find("| final |") != std::string::npos);
}

TEST_CASE("prune on a missing dataset exits 3 and names the path") {
  const auto dir = fresh_dir("prune_missing");
  const auto r = run_cli("prune --dataset " + dir + "/gone.csv --out " + dir);
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("gone.csv") != std::string::npos);
}

TEST_CASE("evaluate reports exactly zero error for an exact model") {
  const auto dir = fresh_dir("eval_zero");
  std::string csv, meta, model;
  write_zero_task(dir, &csv, &meta, &model);
  const auto r = run_cli("evaluate --model " + model + " --dataset " + csv +
                         " --segment val --warmup 10 --out " + dir);
  INFO(r.err);
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(slurp(dir + "/metrics.json"));
  CHECK(j["mse"] == 0.0);
  CHECK(j["rmse"] == 0.0);
  CHECK(j["segment"] == "val");
}

TEST_CASE("evaluate excludes the warm-up steps from metrics") {
  const auto dir = fresh_dir("eval_warmup");
  std::string csv, meta, model;
  write_zero_task(dir, &csv, &meta, &model);
  // Poison the target inside the first 50 test samples only.
  auto ds = read_dataset(csv, meta);
  ds.target.values[ds.val_end + 10] = 100.0;
  write_dataset(ds, csv, meta);

  const auto with_warmup = run_cli("evaluate --model " + model + " --dataset " +
                                   csv + " --segment test --out " + dir);
  REQUIRE(with_warmup.exit_code == 0);
  const auto j1 = nlohmann::json::parse(slurp(dir + "/metrics.json"));
  CHECK(j1["mse"] == 0.0);  // spike hidden by the default 50-step warm-up

  const auto no_warmup = run_cli("evaluate --model " + model + " --dataset " +
                                 csv + " --segment test --warmup 0 --out " + dir);
  REQUIRE(no_warmup.exit_code == 0);
  const auto j2 = nlohmann::json::parse(slurp(dir + "/metrics.json"));
  CHECK(j2["mse"].get<double>() > 0.0);
}

TEST_CASE("evaluate writes one prediction row per segment sample") {
  const auto dir = fresh_dir("eval_rows");
  std::string csv, meta, model;
  write_zero_task(dir, &csv, &meta, &model);
  const auto r = run_cli("evaluate --model " + model + " --dataset " + csv +
                         " --segment test --out " + dir);
  REQUIRE(r.exit_code == 0);
  const auto pred = slurp(dir + "/predictions.csv");
  std::size_t rows = 0;
  for (char c : pred)
    if (c == '\n') ++rows;
  CHECK(rows == 260 - 180 + 1);  // test segment length + header
  CHECK(fs::exists(dir + "/predictions.svg"));
}

TEST_CASE("evaluate with a model naming an absent channel exits 4") {
  const auto dir = fresh_dir("eval_mismatch");
  std::string csv, meta, model;
  write_zero_task(dir, &csv, &meta, &model);
  auto m = read_model(model);
  m.channel_names = {"zzz"};
  write_model(m, model);
  const auto r = run_cli("evaluate --model " + model + " --dataset " + csv +
                         " --out " + dir);
  CHECK(r.exit_code == 4);
  CHECK(r.err.find("zzz") != std::string::npos);
}

TEST_CASE("report renders charts from artifacts in a run directory") {
  const auto dir = fresh_dir("report");
  write_text_file(dir + "/loss_history.csv",
                  "epoch,train_loss,val_loss\n1,1.0,1.2\n2,0.5,0.7\n");
  write_text_file(dir + "/causality.csv",
                  "name,score,rank\nF,0.4,1\nx,0.3,2\nnoise1,0.01,3\n");
  const auto r = run_cli("report --out " + dir);
  INFO(r.err);
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(dir + "/loss_history.svg"));
  CHECK(fs::exists(dir + "/causality_scores.svg"));
  const auto m = read_manifest(dir + "/report_manifest.json");
  CHECK(m.warnings == 0);
}

TEST_CASE("report skips an empty loss history with a recorded warning") {
  const auto dir = fresh_dir("report_empty");
  write_text_file(dir + "/loss_history.csv", "epoch,train_loss,val_loss\n");
  const auto r = run_cli("report --out " + dir);
  REQUIRE(r.exit_code == 0);
  CHECK_FALSE(fs::exists(dir + "/loss_history.svg"));
  const auto m = read_manifest(dir + "/report_manifest.json");
  CHECK(m.warnings >= 1);
  CHECK(r.err.find("warning") != std::string::npos);
}
