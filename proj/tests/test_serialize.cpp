#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ltcprune/ltcprune.hpp"
#include "test_util.hpp"

using namespace ltcprune;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("ltcprune_test_" + name))
      .string();
}

ObserverModel small_model() {
  ObserverModel m;
  m.hidden_size = 3;
  m.channel_names = {"a", "b"};
  m.params = init_params(3, 2, 7);
  m.dt = 0.05;
  m.seed = 7;
  m.epochs_run = 4;
  m.best_val_loss = 0.125;
  return m;
}

}  // namespace

TEST_CASE("format_double round-trips doubles bit-exactly through strtod") {
  const std::vector<double> cases = {
      0.0,     1.0,          -1.0,        0.1,       1.0 / 3.0,
      0.05,    3.1415926535897931, 1e-300, 1e300,    -4.9406564584124654e-324,
      2.5e-17, 0.8414709848078965, 123456789.123456789,
  };
  for (double x : cases) {
    const std::string s = format_double(x);
    char* end = nullptr;
    const double back = std::strtod(s.c_str(), &end);
    INFO("value " << s);
    CHECK(*end == '\0');
    CHECK(std::memcmp(&back, &x, sizeof x) == 0);
  }
}

TEST_CASE("dataset CSV text matches hand-built rows") {
  // Writer-only check; the fixture is deliberately too small to validate.
  TimeSeriesDataset ds;
  ds.t = {0.0, 0.5};
  Channel a;
  a.meta.name = "a";
  a.values = {1.0, -3.0};
  ds.channels.push_back(a);
  ds.target.meta.name = "y";
  ds.target.values = {2.0, 4.5};
  CHECK(dataset_csv_text(ds) == "t,a,y\n0,1,2\n0.5,-3,4.5\n");
}

TEST_CASE("dataset write/read round-trips bit-exactly") {
  auto ds = testutil::tiny_dataset(11);
  const auto csv = tmp_path("ds.csv");
  const auto meta = tmp_path("ds.json");
  write_dataset(ds, csv, meta);
  const auto back = read_dataset(csv, meta);

  REQUIRE(back.size() == ds.size());
  CHECK(back.train_end == ds.train_end);
  CHECK(back.val_end == ds.val_end);
  REQUIRE(back.channels.size() == ds.channels.size());
  for (std::size_t c = 0; c < ds.channels.size(); ++c) {
    CHECK(back.channels[c].meta.name == ds.channels[c].meta.name);
    CHECK(back.channels[c].meta.mu == ds.channels[c].meta.mu);
    CHECK(back.channels[c].meta.sigma == ds.channels[c].meta.sigma);
    CHECK(back.channels[c].meta.kind == ds.channels[c].meta.kind);
    CHECK(back.channels[c].values == ds.channels[c].values);
  }
  CHECK(back.t == ds.t);
  CHECK(back.target.values == ds.target.values);
  CHECK(back.target.meta.name == ds.target.meta.name);

  // Re-serializing the read-back dataset reproduces the files byte for byte.
  CHECK(dataset_csv_text(back) == read_text_file(csv));
  CHECK(dataset_meta_text(back) == read_text_file(meta));
}

TEST_CASE("dataset reader rejects malformed inputs") {
  auto ds = testutil::tiny_dataset(12);
  const auto csv = tmp_path("bad.csv");
  const auto meta = tmp_path("bad.json");
  write_dataset(ds, csv, meta);
  const std::string good_csv = read_text_file(csv);

  SECTION("empty csv") {
    write_text_file(csv, "");
    CHECK_THROWS_AS(read_dataset(csv, meta), data_error);
  }
  SECTION("header does not match metadata") {
    std::string t = good_csv;
    t.replace(t.find("sig"), 3, "sag");
    write_text_file(csv, t);
    CHECK_THROWS_AS(read_dataset(csv, meta), data_error);
  }
  SECTION("row with wrong column count") {
    write_text_file(csv, good_csv + "1.0,2.0\n");
    CHECK_THROWS_AS(read_dataset(csv, meta), data_error);
  }
  SECTION("non-numeric cell") {
    std::string t = good_csv;
    const auto nl = t.find('\n');
    t.replace(nl + 1, 1, "x");
    write_text_file(csv, t);
    CHECK_THROWS_AS(read_dataset(csv, meta), data_error);
  }
  SECTION("row count disagrees with metadata") {
    std::string t = good_csv;
    t.erase(t.rfind('\n', t.size() - 2) + 1);
    write_text_file(csv, t);
    CHECK_THROWS_AS(read_dataset(csv, meta), data_error);
  }
  SECTION("malformed metadata json") {
    write_text_file(meta, "{not json");
    CHECK_THROWS_AS(read_dataset(csv, meta), data_error);
  }
  SECTION("metadata missing a field") {
    std::string t = read_text_file(meta);
    const auto pos = t.find("\"train_end\"");
    t.replace(pos, 11, "\"train_ennd\"");
    write_text_file(meta, t);
    CHECK_THROWS_AS(read_dataset(csv, meta), data_error);
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(read_dataset(tmp_path("nonexistent.csv"), meta), data_error);
  }
}

TEST_CASE("model JSON round-trips bit-exactly") {
  const auto m = small_model();
  const auto path = tmp_path("model.json");
  write_model(m, path);
  const auto back = read_model(path);

  CHECK(back.hidden_size == m.hidden_size);
  CHECK(back.dt == m.dt);
  CHECK(back.seed == m.seed);
  CHECK(back.channel_names == m.channel_names);
  CHECK(back.epochs_run == m.epochs_run);
  CHECK(back.best_val_loss == m.best_val_loss);
  CHECK(back.params.tau_raw == m.params.tau_raw);
  CHECK(back.params.b == m.params.b);
  CHECK(back.params.w_rec.data == m.params.w_rec.data);
  CHECK(back.params.w_rec.rows == m.params.w_rec.rows);
  CHECK(back.params.w_rec.cols == m.params.w_rec.cols);
  CHECK(back.params.w_in.data == m.params.w_in.data);
  CHECK(back.params.w_in.rows == m.params.w_in.rows);
  CHECK(back.params.w_in.cols == m.params.w_in.cols);
  CHECK(back.params.readout_w == m.params.readout_w);
  CHECK(back.params.readout_b == m.params.readout_b);

  // Write -> read -> write is byte-identical.
  CHECK(model_json_text(back) == read_text_file(path));

  // The round-tripped model computes the identical trajectory.
  Matrix inputs(20, 2);
  SplitMix64 rng(5);
  for (auto& x : inputs.data) x = rng.uniform(-1.0, 1.0);
  const auto f1 = forward(m, inputs);
  const auto f2 = forward(back, inputs);
  CHECK(f1.estimates == f2.estimates);
}

TEST_CASE("model reader rejects tampered files") {
  const auto m = small_model();
  const auto path = tmp_path("model_bad.json");

  SECTION("schema_version mismatch") {
    write_model(m, path);
    std::string t = read_text_file(path);
    t.replace(t.find("\"schema_version\": 1"), 19, "\"schema_version\": 9");
    write_text_file(path, t);
    CHECK_THROWS_AS(read_model(path), data_error);
  }
  SECTION("parameter array sizes disagree with shapes") {
    auto broken = m;
    broken.params.w_rec.data.push_back(0.0);
    write_model(broken, path);
    CHECK_THROWS_AS(read_model(path), data_error);
  }
  SECTION("missing params object") {
    write_model(m, path);
    std::string t = read_text_file(path);
    t.replace(t.find("\"params\""), 8, "\"parama\"");
    write_text_file(path, t);
    CHECK_THROWS_AS(read_model(path), data_error);
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(read_model(tmp_path("no_such_model.json")), data_error);
  }
}

TEST_CASE("train report serializes all fields") {
  TrainReport r;
  r.seed = 3;
  r.epochs_run = 2;
  r.best_epoch = 2;
  r.best_val_loss = 0.5;
  r.stop_reason = "max_epochs";
  r.warmup_in_windows = true;
  r.train_loss = {1.5, 0.75};
  r.val_loss = {1.25, 0.5};

  const auto j = nlohmann::json::parse(train_report_json_text(r));
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["seed"] == 3);
  CHECK(j["epochs_run"] == 2);
  CHECK(j["best_epoch"] == 2);
  CHECK(j["best_val_loss"] == 0.5);
  CHECK(j["stop_reason"] == "max_epochs");
  CHECK(j["warmup_in_windows"] == true);
  CHECK(j["train_loss"] == nlohmann::json({1.5, 0.75}));
  CHECK(j["val_loss"] == nlohmann::json({1.25, 0.5}));

  CHECK(loss_history_csv_text(r) ==
        "epoch,train_loss,val_loss\n1,1.5,1.25\n2,0.75,0.5\n");
}

TEST_CASE("causality report serializes entries in rank order") {
  CausalityReport r;
  r.model_seed = 9;
  r.hidden_size = 4;
  r.forward_passes = 3;
  r.spec.epsilon = 0.005;
  r.spec.window_start = 50;
  r.spec.window_len = 100;
  r.spec.segment = Segment::val;
  r.entries = {{"A", 0.5, 1}, {"B", 0.25, 2}};

  CHECK(causality_csv_text(r) == "name,score,rank\nA,0.5,1\nB,0.25,2\n");

  const auto j = nlohmann::json::parse(causality_json_text(r));
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["model_seed"] == 9);
  CHECK(j["hidden_size"] == 4);
  CHECK(j["forward_passes"] == 3);
  CHECK(j["spec"]["epsilon"] == 0.005);
  CHECK(j["spec"]["window_start"] == 50);
  CHECK(j["spec"]["window_len"] == 100);
  CHECK(j["spec"]["segment"] == "val");
  REQUIRE(j["entries"].size() == 2);
  CHECK(j["entries"][0]["name"] == "A");
  CHECK(j["entries"][0]["score"] == 0.5);
  CHECK(j["entries"][0]["rank"] == 1);
  CHECK(j["entries"][1]["name"] == "B");
}

TEST_CASE("prune trace JSON carries per-iteration structure") {
  PruneTrace t;
  t.stop_reason = "budget";
  t.best_iteration = 1;
  t.returned_iteration = 1;
  t.final_channels = {"a"};
  PruneIteration it;
  it.index = 1;
  it.active = {"a", "b"};
  it.val_loss = 0.25;
  it.removed = {"b"};
  it.train_report.seed = 5;
  it.train_report.epochs_run = 7;
  it.train_report.stop_reason = "early_stop";
  it.causality.entries = {{"a", 0.5, 1}, {"b", 0.001, 2}};
  t.iterations.push_back(it);

  const auto j = nlohmann::json::parse(prune_trace_json_text(t));
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["stop_reason"] == "budget");
  CHECK(j["best_iteration"] == 1);
  CHECK(j["returned_iteration"] == 1);
  CHECK(j["final_channels"] == nlohmann::json({"a"}));
  REQUIRE(j["iterations"].size() == 1);
  const auto& i0 = j["iterations"][0];
  CHECK(i0["iteration"] == 1);
  CHECK(i0["active"] == nlohmann::json({"a", "b"}));
  CHECK(i0["val_loss"] == 0.25);
  CHECK(i0["removed"] == nlohmann::json({"b"}));
  CHECK(i0["train_seed"] == 5);
  CHECK(i0["train_epochs"] == 7);
  CHECK(i0["train_stop_reason"] == "early_stop");
  CHECK(i0["causality"]["entries"].size() == 2);
}

TEST_CASE("metrics JSON de-standardizes through the stored channel scale") {
  EvalMetrics m;
  m.mse = 0.04;
  m.rmse = 0.2;
  ChannelMeta target;
  target.name = "y";
  target.mu = 10.0;
  target.sigma = 2.0;
  const auto j = nlohmann::json::parse(metrics_json_text(m, Segment::test, target, 50));
  CHECK(j["segment"] == "test");
  CHECK(j["warmup_steps"] == 50);
  CHECK(j["target"] == "y");
  CHECK(j["mse"] == 0.04);
  CHECK(j["rmse"] == 0.2);
  CHECK(j["mse_destandardized"].get<double>() == 0.04 * 2.0 * 2.0);
  CHECK(j["rmse_destandardized"].get<double>() == 0.2 * 2.0);
}

TEST_CASE("predictions CSV aligns rows with the segment") {
  auto ds = testutil::tiny_dataset(13);
  const SegmentRange range = segment_range(ds, Segment::val);
  std::vector<double> est(range.length(), 0.0);
  const auto text = predictions_csv_text(ds, Segment::val, est);

  std::size_t rows = 0;
  for (char c : text)
    if (c == '\n') ++rows;
  CHECK(rows == range.length() + 1);  // header + one row per sample

  // First data row carries the de-standardized truth via mu/sigma.
  const auto l1 = text.find('\n') + 1;
  const auto l2 = text.find('\n', l1);
  const std::string row = text.substr(l1, l2 - l1);
  const auto cells = [&] {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
      const auto comma = row.find(',', pos);
      if (comma == std::string::npos) {
        out.push_back(row.substr(pos));
        return out;
      }
      out.push_back(row.substr(pos, comma - pos));
      pos = comma + 1;
    }
  }();
  REQUIRE(cells.size() == 5);
  const double truth = ds.target.values[range.begin];
  CHECK(cells[0] == format_double(ds.t[range.begin]));
  CHECK(cells[1] == format_double(truth));
  CHECK(cells[2] == format_double(0.0));
  CHECK(cells[3] ==
        format_double(truth * ds.target.meta.sigma + ds.target.meta.mu));

  SECTION("length mismatch throws") {
    est.pop_back();
    CHECK_THROWS_AS(predictions_csv_text(ds, Segment::val, est), mismatch_error);
  }
}

TEST_CASE("json_get reports missing and ill-typed fields") {
  const auto j = nlohmann::json::parse(R"({"a": 1, "s": "x"})");
  CHECK(json_get<int>(j, "a") == 1);
  CHECK(json_get<std::string>(j, "s") == "x");
  CHECK_THROWS_AS(json_get<int>(j, "missing"), data_error);
  CHECK_THROWS_AS(json_get<int>(j, "s"), data_error);
}

TEST_CASE("manifest round-trips and its run id ignores the timestamp") {
  RunManifest m;
  m.command = "generate";
  m.config_text = "[dataset]\ntestbed = cstr\n";
  m.args = {{"testbed", "cstr"}, {"seed", "7"}};
  m.artifacts = {{"dataset_csv", "/tmp/out/dataset.csv"}};
  m.created = "2025-01-01T00:00:00Z";
  m.warnings = 1;
  m.run_id = make_run_id(m.command, m.config_text, m.args);

  const auto path = tmp_path("manifest.json");
  write_manifest(m, path);
  const auto back = read_manifest(path);
  CHECK(back.run_id == m.run_id);
  CHECK(back.command == m.command);
  CHECK(back.config_text == m.config_text);
  CHECK(back.args == m.args);
  CHECK(back.artifacts == m.artifacts);
  CHECK(back.tool_version == m.tool_version);
  CHECK(back.created == m.created);
  CHECK(back.warnings == m.warnings);
  CHECK(manifest_json_text(back) == read_text_file(path));

  // Identity depends on command/config/args only.
  auto later = m;
  later.created = "2030-12-31T23:59:59Z";
  CHECK(make_run_id(later.command, later.config_text, later.args) == m.run_id);
  auto other = m;
  other.args["seed"] = "8";
  CHECK(make_run_id(other.command, other.config_text, other.args) != m.run_id);
}

TEST_CASE("JSON writer escapes strings and parses back") {
  JNode root = JNode::obj();
  root.add("quote\"back\\slash", JNode::s("line\nbreak\ttab"));
  root.add("empty_obj", JNode::obj());
  root.add("empty_arr", JNode::arr());
  const auto text = dump_json(root);
  const auto j = nlohmann::json::parse(text);
  CHECK(j["quote\"back\\slash"] == "line\nbreak\ttab");
  CHECK(j["empty_obj"].is_object());
  CHECK(j["empty_arr"].is_array());
}
