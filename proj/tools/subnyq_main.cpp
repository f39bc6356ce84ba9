// subnyq — sub-Nyquist sampling experiment runner.
//
//   subnyq run <experiment> [flags] [section.key=value ...]
//   subnyq validate <experiment> [flags] [section.key=value ...]
//
// Exit codes: 0 success, 2 usage/parse error, 3 config validation failure.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "subnyq/experiments.hpp"
#include "subnyq/fft.hpp"
#include "subnyq/io.hpp"

namespace fs = std::filesystem;
using namespace subnyq;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInvalidConfig = 3;

struct CliOptions {
  std::string experiment;
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<int> jobs;
  bool reduced = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Resolves defaults + config file + dotted overrides + explicit flags into
/// the effective config. Throws UsageError for anything unparseable.
ExperimentConfig resolve_config(const CliOptions& opt) {
  json doc = json::object();
  if (!opt.config_path.empty()) {
    std::ifstream is(opt.config_path);
    if (!is) throw UsageError("cannot open config file: " + opt.config_path);
    try {
      doc = json::parse(is);
    } catch (const json::parse_error& e) {
      throw UsageError("config file " + opt.config_path + ": " + e.what());
    }
    if (!doc.is_object())
      throw UsageError("config file " + opt.config_path +
                       ": top level must be a JSON object");
  }
  try {
    for (const auto& ov : opt.overrides) apply_override(doc, ov);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::string name = opt.experiment;
  if (name.empty() && doc.contains("experiment") &&
      doc["experiment"].is_string())
    name = doc["experiment"].get<std::string>();
  ExperimentId id{};
  if (name.empty())
    throw UsageError(
        "no experiment named (pass one of channel-sweep, windowing, "
        "block-demo, basis-mismatch, or set \"experiment\" in the config)");
  if (!experiment_from_string(name, id))
    throw UsageError("unknown experiment '" + name +
                     "' (valid: channel-sweep, windowing, block-demo, "
                     "basis-mismatch)");

  auto cfg = default_config(id);
  try {
    config_from_json(doc, cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (opt.reduced) apply_reduced_scale(cfg);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.trials) cfg.trials = *opt.trials;
  if (opt.jobs) cfg.jobs = *opt.jobs;
  return cfg;
}

void print_checks(const std::vector<ConstraintCheck>& checks, std::ostream& os) {
  for (const auto& c : checks)
    os << (c.pass ? "PASS  " : c.advisory ? "WARN  " : "FAIL  ") << c.name
       << "  [" << c.detail << "]\n";
}

int cmd_validate(const CliOptions& opt) {
  const auto cfg = resolve_config(opt);
  const auto checks = validate_config(cfg);
  print_checks(checks, std::cout);
  int hard = 0, advisory = 0;
  for (const auto& c : checks)
    if (!c.pass) (c.advisory ? advisory : hard)++;
  if (hard == 0)
    std::cout << "all constraints satisfied"
              << (advisory ? " (" + std::to_string(advisory) + " warning(s))"
                           : std::string())
              << "\n";
  else
    std::cout << hard << " constraint(s) violated, " << advisory
              << " warning(s)\n";
  return 0;  // validate reports; it never fails the process
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

json record_summary_json(const ExperimentRecord& rec) {
  json j{{"sweep_value", rec.sweep_value},
         {"mean_error", rec.mean_error},
         {"p10", rec.p10},
         {"p50", rec.p50},
         {"p90", rec.p90},
         {"success_rate", rec.success_rate}};
  if (!rec.label.empty()) j["label"] = rec.label;
  return j;
}

/// Writes trials/summary CSVs, one pair per label (unlabeled records share
/// the plain `trials.csv` / `summary.csv`).
void write_tables(const std::vector<ExperimentRecord>& records,
                  const fs::path& out, RunManifest& man) {
  std::vector<std::string> labels;
  for (const auto& rec : records)
    if (std::find(labels.begin(), labels.end(), rec.label) == labels.end())
      labels.push_back(rec.label);
  for (const auto& label : labels) {
    std::vector<ExperimentRecord> group;
    for (const auto& rec : records)
      if (rec.label == label) group.push_back(rec);
    const std::string suffix = label.empty() ? "" : "_" + label;
    const fs::path trials = out / ("trials" + suffix + ".csv");
    const fs::path summary = out / ("summary" + suffix + ".csv");
    write_file(trials, [&](std::ostream& os) { write_trials_csv(os, group); });
    write_file(summary, [&](std::ostream& os) { write_summary_csv(os, group); });
    man.outputs.push_back(trials.string());
    man.outputs.push_back(summary.string());
  }
}

int cmd_run(const CliOptions& opt) {
  const auto cfg = resolve_config(opt);

  const auto checks = validate_config(cfg);
  bool hard_fail = false;
  for (const auto& c : checks) {
    if (c.pass) continue;
    if (c.advisory) {
      std::cerr << "subnyq: warning: " << c.name << " [" << c.detail << "]\n";
    } else {
      std::cerr << "subnyq: constraint failed: " << c.name << " [" << c.detail
                << "]\n";
      hard_fail = true;
    }
  }
  if (hard_fail) return kExitInvalidConfig;

  const fs::path out = opt.out_dir.empty()
                           ? fs::path("out") / to_string(cfg.id)
                           : fs::path(opt.out_dir);
  fs::create_directories(out);

  RunManifest man;
  man.config = to_json(cfg);
  man.config_hash = config_hash(man.config);
  man.created_utc = iso8601_utc_now();

  std::cerr << "subnyq: running " << to_string(cfg.id) << " (seed " << cfg.seed
            << ", " << cfg.trials << " trials/point)\n";
  const auto t0 = std::chrono::steady_clock::now();

  switch (cfg.id) {
    case ExperimentId::channel_sweep:
    case ExperimentId::windowing:
    case ExperimentId::basis_mismatch: {
      const auto records = cfg.id == ExperimentId::channel_sweep
                               ? exp_channel_sweep(cfg)
                           : cfg.id == ExperimentId::windowing
                               ? exp_windowing(cfg)
                               : exp_basis_mismatch(cfg);
      man.stages.emplace_back("experiment", seconds_since(t0));
      const auto tw = std::chrono::steady_clock::now();
      write_tables(records, out, man);
      man.stages.emplace_back("write", seconds_since(tw));
      json recs = json::array();
      for (const auto& rec : records) recs.push_back(record_summary_json(rec));
      man.results["records"] = std::move(recs);
      break;
    }
    case ExperimentId::block_demo: {
      const auto demo = exp_block_demo(cfg);
      man.stages.emplace_back("experiment", seconds_since(t0));
      const auto tw = std::chrono::steady_clock::now();
      write_tables({demo.record}, out, man);

      // First-trial waveforms: input, reconstruction, channel samples, and
      // the input spectrum backing the essential-bandwidth figure.
      std::vector<cdouble> xc(demo.x.begin(), demo.x.end());
      std::vector<cdouble> xhatc(demo.xhat.begin(), demo.xhat.end());
      const fs::path sig_p = out / "signal.csv";
      const fs::path rec_p = out / "reconstruction.csv";
      const fs::path smp_p = out / "samples.csv";
      const fs::path spec_p = out / "spectrum.csv";
      write_file(sig_p, [&](std::ostream& os) {
        write_signal_csv(os, demo.times, xc);
      });
      write_file(rec_p, [&](std::ostream& os) {
        write_signal_csv(os, demo.times, xhatc);
      });
      write_file(smp_p, [&](std::ostream& os) {
        write_samples_csv(os, demo.samples);
      });
      {
        const auto X = fft(xc);
        const std::size_t n = X.size();
        std::vector<double> omega(n);
        std::vector<cdouble> shifted(n);
        for (std::size_t j = 0; j < n; ++j) {
          // ascending angular frequency: bins -n/2 .. n/2-1
          const auto u = std::int64_t(j) - std::int64_t(n / 2);
          omega[j] = 2.0 * kPi * double(u) / cfg.blk_T;
          shifted[j] = X[bin_index(u, n)];
        }
        write_file(spec_p, [&](std::ostream& os) {
          write_spectrum_csv(os, omega, shifted);
        });
      }
      for (const auto& p : {sig_p, rec_p, smp_p, spec_p})
        man.outputs.push_back(p.string());
      man.stages.emplace_back("write", seconds_since(tw));

      man.results = {{"normalized_squared_error", demo.record.mean_error},
                     {"success_rate", demo.record.success_rate},
                     {"sample_rate_hz", demo.sample_rate_hz},
                     {"essential_bandwidth_hz", demo.essential_bw_hz},
                     {"nyquist_equivalent_hz", demo.nyquist_equivalent_hz},
                     {"rate_reduction", demo.rate_reduction}};
      man.results["records"] = json::array({record_summary_json(demo.record)});
      break;
    }
  }

  const fs::path man_p = out / "manifest.json";
  write_file(man_p, [&](std::ostream& os) {
    os << to_json(man).dump(2) << '\n';
  });
  char elapsed[32];
  std::snprintf(elapsed, sizeof(elapsed), "%.2f", seconds_since(t0));
  std::cerr << "subnyq: done in " << elapsed << " s; outputs in "
            << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sub-Nyquist acquisition and sparse-recovery experiment runner"};
  app.require_subcommand(1);

  CliOptions opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("experiment", opt.experiment,
                    "channel-sweep | windowing | block-demo | basis-mismatch");
    sub->add_option("overrides", opt.overrides,
                    "dotted config overrides (e.g. mwc.q_prime=25)");
    sub->add_option("--config", opt.config_path, "JSON config file");
    sub->add_option("--seed", opt.seed, "base RNG seed");
    sub->add_option("--trials", opt.trials, "trials per sweep point");
    sub->add_option("--jobs", opt.jobs,
                    "worker threads (default: machine parallelism)");
  };
  auto* run = app.add_subcommand("run", "execute an experiment");
  add_common(run);
  run->add_option("--out", opt.out_dir,
                  "output directory (default: out/<experiment>)");
  run->add_flag("--reduced", opt.reduced, "desk-scale trial counts");
  auto* validate =
      app.add_subcommand("validate", "check config constraints without running");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  // A first positional containing '=' is an override, not an experiment name.
  if (opt.experiment.find('=') != std::string::npos) {
    opt.overrides.insert(opt.overrides.begin(), opt.experiment);
    opt.experiment.clear();
  }

  try {
    return run->parsed() ? cmd_run(opt) : cmd_validate(opt);
  } catch (const UsageError& e) {
    std::cerr << "subnyq: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "subnyq: error: " << e.what() << "\n";
    return 1;
  }
}
