#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "ltcprune/ltcprune.hpp"

using namespace ltcprune;

TEST_CASE("parse_config_text reads sections, keys, and comments") {
  const std::string text =
      "# leading comment\n"
      "[dataset]\n"
      "testbed = cstr   \n"
      "  n_noise=2\n"
      "; another comment style\n"
      "\n"
      "[train]\n"
      "lr = 0.005\n";
  const auto cfg = parse_config_text(text);
  REQUIRE(cfg.has("dataset"));
  REQUIRE(cfg.has("train"));
  CHECK(cfg.sections.at("dataset").at("testbed") == "cstr");
  CHECK(cfg.sections.at("dataset").at("n_noise") == "2");
  CHECK(cfg.sections.at("train").at("lr") == "0.005");
  CHECK_FALSE(cfg.has("prune"));
}

TEST_CASE("parse_config_text rejects malformed lines") {
  CHECK_THROWS_AS(parse_config_text("key = 1\n"), config_error);  // no section
  CHECK_THROWS_AS(parse_config_text("[sec\nk = 1\n"), config_error);
  CHECK_THROWS_AS(parse_config_text("[]\n"), config_error);
  CHECK_THROWS_AS(parse_config_text("[s]\njust words\n"), config_error);
  CHECK_THROWS_AS(parse_config_text("[s]\n= 1\n"), config_error);
  CHECK_THROWS_AS(parse_config_text("[s]\na = 1\na = 2\n"), config_error);
}

TEST_CASE("empty sections and empty text are fine") {
  CHECK(parse_config_text("").sections.empty());
  const auto cfg = parse_config_text("[train]\n");
  CHECK(cfg.has("train"));
  CHECK(cfg.sections.at("train").empty());
}

TEST_CASE("section readers apply defaults when keys are absent") {
  const auto cfg = parse_config_text("");
  const auto spec = dataset_spec_from(cfg);
  CHECK(spec.testbed == Testbed::mechanical);
  CHECK(spec.n_noise == 3);
  CHECK(spec.split.train_frac == 0.8);
  CHECK(spec.split.val_frac_of_train == 0.2);
  CHECK(spec.split.warmup == 50);

  const TrainConfig def;
  const auto tc = train_from(cfg);
  CHECK(tc.lr == def.lr);
  CHECK(tc.max_epochs == def.max_epochs);
  CHECK(tc.window_len == def.window_len);
  CHECK(tc.window_stride == def.window_stride);
  CHECK(tc.hidden_size == def.hidden_size);

  const PruneConfig pdef;
  const auto pc = prune_from(cfg);
  CHECK(pc.threshold_mode == pdef.threshold_mode);
  CHECK(pc.threshold_tau == pdef.threshold_tau);
  CHECK(pc.degradation_tol == pdef.degradation_tol);
  CHECK(pc.min_sensors == pdef.min_sensors);
  CHECK(pc.max_iters == pdef.max_iters);
  CHECK(pc.spec.epsilon == PerturbationSpec{}.epsilon);
}

TEST_CASE("section readers override the keyed fields only") {
  const auto cfg = parse_config_text(
      "[train]\n"
      "lr = 0.01\n"
      "hidden_size = 16\n"
      "[prune]\n"
      "threshold_mode = absolute\n"
      "threshold_tau = 0.002\n"
      "[perturbation]\n"
      "epsilon = 0.001\n"
      "segment = test\n");
  const auto tc = train_from(cfg);
  CHECK(tc.lr == 0.01);
  CHECK(tc.hidden_size == 16);
  CHECK(tc.max_epochs == TrainConfig{}.max_epochs);

  const auto pc = prune_from(cfg);
  CHECK(pc.threshold_mode == ThresholdMode::absolute);
  CHECK(pc.threshold_tau == 0.002);
  CHECK(pc.train_cfg.lr == 0.01);  // nested train section flows through
  CHECK(pc.spec.epsilon == 0.001);
  CHECK(pc.spec.segment == Segment::test);
}

TEST_CASE("unknown keys fail loudly") {
  const auto cfg = parse_config_text("[train]\nlearning_rate = 0.1\n");
  CHECK_THROWS_AS(train_from(cfg), config_error);
  const auto cfg2 = parse_config_text("[dataset]\ntestbedd = cstr\n");
  CHECK_THROWS_AS(dataset_spec_from(cfg2), config_error);
}

TEST_CASE("typed getters reject unparseable values") {
  CHECK_THROWS_AS(train_from(parse_config_text("[train]\nlr = fast\n")),
                  config_error);
  CHECK_THROWS_AS(train_from(parse_config_text("[train]\nmax_epochs = ten\n")),
                  config_error);
  CHECK_THROWS_AS(
      dataset_spec_from(parse_config_text("[dataset]\ntestbed = reactor\n")),
      config_error);
  CHECK_THROWS_AS(
      prune_from(parse_config_text("[prune]\nthreshold_mode = sideways\n")),
      config_error);
  CHECK_THROWS_AS(
      perturbation_from(parse_config_text("[perturbation]\nsegment = all\n")),
      config_error);
}

TEST_CASE("testbed config sections map onto the generator structs") {
  const auto cfg = parse_config_text(
      "[mechanical]\n"
      "m = 2.5\n"
      "seed = 42\n"
      "[cstr]\n"
      "inflow_noise = 0.25\n"
      "[predprey]\n"
      "alpha_base = 1.25\n");
  const auto mc = mechanical_from(cfg);
  CHECK(mc.m == 2.5);
  CHECK(mc.seed == 42);
  CHECK(mc.k == MechanicalConfig{}.k);
  const auto cc = cstr_from(cfg);
  CHECK(cc.inflow_noise == 0.25);
  CHECK(cc.f_out == CstrConfig{}.f_out);
  const auto pp = predprey_from(cfg);
  CHECK(pp.alpha_base == 1.25);
  CHECK(pp.beta == PredPreyConfig{}.beta);
}

namespace {

// Render -> parse -> load -> render must be a fixed point; the manifest
// rerun path depends on it.
template <typename T, typename Loader>
void check_render_roundtrip(const T& value, Loader load) {
  const std::string text = render_config(value);
  const auto cfg = parse_config_text(text);
  const T back = load(cfg);
  CHECK(render_config(back) == text);
}

}  // namespace

TEST_CASE("render_config round-trips through the parser") {
  MechanicalConfig mc;
  mc.m = 1.75;
  mc.force_cutoff = 0.125;
  mc.seed = 910;
  check_render_roundtrip(mc, [](const ConfigFile& c) { return mechanical_from(c); });

  CstrConfig cc;
  cc.inflow_noise = 0.3;
  cc.seed = 11;
  check_render_roundtrip(cc, [](const ConfigFile& c) { return cstr_from(c); });

  PredPreyConfig pp;
  pp.alpha_amp = 0.45;
  check_render_roundtrip(pp, [](const ConfigFile& c) { return predprey_from(c); });

  TrainConfig tc;
  tc.lr = 0.0035;
  tc.window_len = 256;
  check_render_roundtrip(tc, [](const ConfigFile& c) { return train_from(c); });

  PruneConfig pc;
  pc.threshold_tau = 0.07;
  pc.spec.epsilon = 0.002;
  pc.train_cfg.n_seeds = 3;
  check_render_roundtrip(pc, [](const ConfigFile& c) { return prune_from(c); });

  DatasetSpec ds;
  ds.testbed = Testbed::predprey;
  ds.n_noise = 2;
  check_render_roundtrip(ds, [](const ConfigFile& c) { return dataset_spec_from(c); });
}

TEST_CASE("render_config emits every effective value") {
  // Non-default values must be visible in the rendered text; a dropped key
  // would silently revert to defaults on rerun.
  TrainConfig tc;
  tc.lr = 0.0075;
  tc.hidden_size = 24;
  const auto text = render_config(tc);
  CHECK(text.find("lr = 0.0074999999999999997") != std::string::npos);
  CHECK(text.find("hidden_size = 24") != std::string::npos);
  CHECK(text.find("[train]") == 0);
}
