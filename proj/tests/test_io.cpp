#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "subnyq/io.hpp"

using namespace subnyq;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("format_double: shortest form that round-trips") {
  REQUIRE(format_double(0.5) == "0.5");
  REQUIRE(format_double(18.0) == "18");
  REQUIRE(format_double(0.0) == "0");
  for (double v : {1.0 / 3.0, 3e-5, 1e300, -2.7182818284590452, 0.1,
                   123456789.123456789}) {
    const double back = std::stod(format_double(v));
    REQUIRE(back == v);
  }
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

TEST_CASE("write_signal_csv: exact small table") {
  std::vector<double> t{0.0, 0.5};
  std::vector<cdouble> x{{1.0, 2.0}, {-0.25, 0.0}};
  std::ostringstream os;
  write_signal_csv(os, t, x);
  REQUIRE(os.str() == "t,re,im\n0,1,2\n0.5,-0.25,0\n");
}

TEST_CASE("write_signal_csv rejects misaligned inputs") {
  std::vector<double> t{0.0};
  std::vector<cdouble> x{{1.0, 0.0}, {2.0, 0.0}};
  std::ostringstream os;
  REQUIRE_THROWS_AS(write_signal_csv(os, t, x), std::invalid_argument);
}

TEST_CASE("write_spectrum_csv: header and rows") {
  std::vector<double> w{-3.14, 0.0, 3.14};
  std::vector<cdouble> X{{0.0, 1.0}, {2.0, 0.0}, {0.0, -1.0}};
  std::ostringstream os;
  write_spectrum_csv(os, w, X);
  REQUIRE(os.str() ==
          "omega_rad_s,re,im\n-3.14,0,1\n0,2,0\n3.14,0,-1\n");
}

TEST_CASE("write_samples_csv: row-major channel,k layout") {
  CMat Y(2, 2);
  Y << cdouble{1, 0}, cdouble{2, 0}, cdouble{0, 3}, cdouble{0, 4};
  std::ostringstream os;
  write_samples_csv(os, Y);
  REQUIRE(os.str() ==
          "channel,k,re,im\n0,0,1,0\n0,1,2,0\n1,0,0,3\n1,1,0,4\n");
}

namespace {
ExperimentRecord make_record(double value, std::vector<double> errors) {
  ExperimentRecord rec;
  rec.sweep_value = value;
  for (std::size_t i = 0; i < errors.size(); ++i)
    rec.trials.push_back({std::int64_t(i), 1000 + i, errors[i], i % 2 == 0});
  summarize(rec);
  return rec;
}
}  // namespace

TEST_CASE("write_trials_csv and write_summary_csv: spec column layout") {
  std::vector<ExperimentRecord> recs{make_record(18, {0.5, 0.25}),
                                     make_record(25, {0.125})};
  std::ostringstream trials;
  write_trials_csv(trials, recs);
  REQUIRE(trials.str() ==
          "sweep_value,trial,seed,error,support_ok\n"
          "18,0,1000,0.5,1\n"
          "18,1,1001,0.25,0\n"
          "25,0,1000,0.125,1\n");

  std::ostringstream summary;
  write_summary_csv(summary, recs);
  std::string line;
  std::istringstream in(summary.str());
  std::getline(in, line);
  REQUIRE(line == "sweep_value,mean,p10,p50,p90,success_rate");
  std::getline(in, line);
  REQUIRE_THAT(line, ContainsSubstring("18,0.375,"));
  std::getline(in, line);
  REQUIRE_THAT(line, ContainsSubstring("25,0.125,"));
}

// ---------------------------------------------------------------------------
// Recovery JSON
// ---------------------------------------------------------------------------

TEST_CASE("RecoveryResult serializes support, [re,im] coeffs and residual") {
  RecoveryResult r;
  r.support = {4, 1};
  r.coeffs = CMat(2, 1);
  r.coeffs(0, 0) = cdouble{1.5, -2.0};
  r.coeffs(1, 0) = cdouble{0.0, 3.0};
  r.residual_norm = 0.25;
  r.iterations = 2;
  r.converged = true;
  const json j = to_json(r);
  REQUIRE(j["support"] == json({4, 1}));
  REQUIRE(j["coeffs"].size() == 2);
  REQUIRE(j["coeffs"][0][0][0].get<double>() == 1.5);
  REQUIRE(j["coeffs"][0][0][1].get<double>() == -2.0);
  REQUIRE(j["coeffs"][1][0][1].get<double>() == 3.0);
  REQUIRE(j["residual"].get<double>() == 0.25);
  REQUIRE(j["iterations"].get<int>() == 2);
  REQUIRE(j["converged"].get<bool>());
}

// ---------------------------------------------------------------------------
// Config serialization
// ---------------------------------------------------------------------------

TEST_CASE("config JSON round-trips for all experiments") {
  for (auto id : {ExperimentId::channel_sweep, ExperimentId::windowing,
                  ExperimentId::block_demo, ExperimentId::basis_mismatch}) {
    const auto cfg = default_config(id);
    const json j = to_json(cfg);
    auto back = default_config(id);
    back.seed = 0;  // must be restored by the parse
    back.sweep.clear();
    config_from_json(j, back);
    REQUIRE(to_json(back).dump() == j.dump());
  }
}

TEST_CASE("config_from_json: partial documents only touch present keys") {
  auto cfg = default_config(ExperimentId::channel_sweep);
  const auto trials_before = cfg.trials;
  config_from_json(json::parse(R"({"seed": 9, "mwc": {"fidelity_R": 8}})"),
                   cfg);
  REQUIRE(cfg.seed == 9);
  REQUIRE(cfg.fidelity_R == 8);
  REQUIRE(cfg.trials == trials_before);
}

TEST_CASE("config_from_json: scalars promote to one-element lists") {
  auto cfg = default_config(ExperimentId::windowing);
  config_from_json(json::parse(R"({"sweep": 0.5, "mwc": {"q_prime": 25}})"),
                   cfg);
  REQUIRE(cfg.sweep == std::vector<double>{0.5});
  REQUIRE(cfg.qp_list == std::vector<std::int64_t>{25});
}

TEST_CASE("config_from_json: unknown keys and type errors name the path") {
  auto cfg = default_config(ExperimentId::channel_sweep);
  REQUIRE_THROWS_WITH(config_from_json(json::parse(R"({"mwc": {"qprime": 1}})"),
                                       cfg),
                      ContainsSubstring("mwc.qprime"));
  REQUIRE_THROWS_WITH(config_from_json(json::parse(R"({"trialz": 3})"), cfg),
                      ContainsSubstring("trialz"));
  REQUIRE_THROWS_WITH(config_from_json(json::parse(R"({"trials": 2.5})"), cfg),
                      ContainsSubstring("integer"));
  REQUIRE_THROWS_WITH(
      config_from_json(json::parse(R"({"amplitude_mode": "both"})"), cfg),
      ContainsSubstring("equal"));
}

TEST_CASE("config_from_json: experiment key must match the target") {
  auto cfg = default_config(ExperimentId::windowing);
  REQUIRE_NOTHROW(config_from_json(json{{"experiment", "windowing"}}, cfg));
  REQUIRE_THROWS_WITH(
      config_from_json(json{{"experiment", "block-demo"}}, cfg),
      ContainsSubstring("block-demo"));
  REQUIRE_THROWS_WITH(config_from_json(json{{"experiment", "nope"}}, cfg),
                      ContainsSubstring("unknown experiment"));
}

TEST_CASE("config_from_json: block intervals and bump family") {
  auto cfg = default_config(ExperimentId::block_demo);
  config_from_json(json::parse(R"({"block": {
    "intervals": [[0.1, 0.2], [0.5, 0.9]],
    "bumps": {"count": [1, 4], "spike_amp": [0.05, 0.1]}
  }})"),
                   cfg);
  REQUIRE(cfg.blk_intervals ==
          std::vector<std::pair<double, double>>{{0.1, 0.2}, {0.5, 0.9}});
  REQUIRE(cfg.blk_bumps.min_count == 1);
  REQUIRE(cfg.blk_bumps.max_count == 4);
  REQUIRE(cfg.blk_bumps.min_spike_amp == 0.05);
  // untouched fields keep the experiment defaults
  REQUIRE(cfg.blk_bumps.min_spikes == 1);
}

// ---------------------------------------------------------------------------
// Overrides and hashing
// ---------------------------------------------------------------------------

TEST_CASE("apply_override: dotted paths, JSON values, string fallback") {
  json doc = json::object();
  apply_override(doc, "mwc.q_prime=25");
  apply_override(doc, "sweep=[18,25]");
  apply_override(doc, "amplitude_mode=random");
  apply_override(doc, "seed=7");
  REQUIRE(doc["mwc"]["q_prime"] == 25);
  REQUIRE(doc["sweep"] == json({18, 25}));
  REQUIRE(doc["amplitude_mode"] == "random");
  REQUIRE(doc["seed"] == 7);

  auto cfg = default_config(ExperimentId::channel_sweep);
  config_from_json(doc, cfg);
  REQUIRE(cfg.qp_list == std::vector<std::int64_t>{25});
  REQUIRE(cfg.sweep == std::vector<double>{18, 25});
  REQUIRE(cfg.amplitude_mode == AmplitudeMode::random);
  REQUIRE(cfg.seed == 7);
}

TEST_CASE("apply_override: malformed assignments are rejected") {
  json doc = json::object();
  REQUIRE_THROWS_AS(apply_override(doc, "no-equals"), std::invalid_argument);
  REQUIRE_THROWS_AS(apply_override(doc, "=5"), std::invalid_argument);
  doc["seed"] = 1;
  REQUIRE_THROWS_AS(apply_override(doc, "seed.sub=2"), std::invalid_argument);
}

TEST_CASE("config_hash: canonical, field-sensitive, 16 hex chars") {
  const auto a = to_json(default_config(ExperimentId::channel_sweep));
  auto b = a;
  REQUIRE(config_hash(a) == config_hash(b));
  REQUIRE(config_hash(a).size() == 16);
  for (char c : config_hash(a)) REQUIRE(std::string("0123456789abcdef").find(c) != std::string::npos);
  b["seed"] = 1;
  REQUIRE(config_hash(a) != config_hash(b));
}

// ---------------------------------------------------------------------------
// Manifest and file plumbing
// ---------------------------------------------------------------------------

TEST_CASE("RunManifest carries hash, version, stages and outputs") {
  RunManifest m;
  m.config = to_json(default_config(ExperimentId::block_demo));
  m.config_hash = config_hash(m.config);
  m.created_utc = iso8601_utc_now();
  m.stages = {{"experiment", 1.5}, {"write", 0.25}};
  m.outputs = {"out/trials.csv", "out/summary.csv"};
  m.results["normalized_squared_error"] = 0.055;
  const json j = to_json(m);
  REQUIRE(j["tool_version"] == kVersion);
  REQUIRE(j["config_hash"] == m.config_hash);
  REQUIRE(j["config"]["experiment"] == "block-demo");
  REQUIRE(j["stages"][0]["name"] == "experiment");
  REQUIRE(j["stages"][1]["seconds"].get<double>() == 0.25);
  REQUIRE(j["outputs"].size() == 2);
  REQUIRE(j["results"]["normalized_squared_error"].get<double>() == 0.055);
  // ISO-8601 UTC shape: 2026-01-02T03:04:05Z
  REQUIRE(m.created_utc.size() == 20);
  REQUIRE(m.created_utc[10] == 'T');
  REQUIRE(m.created_utc.back() == 'Z');
}

TEST_CASE("write_file: writes content and fails loudly on bad paths") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "subnyq_io_test";
  fs::create_directories(dir);
  const auto p = dir / "x.csv";
  write_file(p, [](std::ostream& os) { os << "a,b\n1,2\n"; });
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  REQUIRE(ss.str() == "a,b\n1,2\n");
  fs::remove_all(dir);

  REQUIRE_THROWS_AS(
      write_file(dir / "missing" / "x.csv", [](std::ostream&) {}),
      std::invalid_argument);
}
