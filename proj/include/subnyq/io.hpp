#pragma once

// Serialization: CSV tables for signals, spectra, samples and experiment
// results; JSON for recovery results, run configs and run manifests.
// CSV doubles use the shortest round-trip representation.

#include <charconv>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "subnyq/common.hpp"
#include "subnyq/experiments.hpp"
#include "subnyq/recovery.hpp"

namespace subnyq {

using json = nlohmann::json;

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  require(ec == std::errc{}, "format_double: conversion failed");
  return std::string(buf, end);
}

/// Opens `path`, runs `fn(ostream)`, and verifies the stream stayed healthy.
template <typename WriteFn>
void write_file(const std::filesystem::path& path, WriteFn&& fn) {
  std::ofstream os(path);
  require(bool(os), "io: cannot open " + path.string() + " for writing");
  fn(os);
  os.flush();
  require(bool(os), "io: write to " + path.string() + " failed");
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

/// Time-domain dump: `t,re,im` (seconds, decimal doubles).
inline void write_signal_csv(std::ostream& os, std::span<const double> t,
                             std::span<const cdouble> x) {
  require(t.size() == x.size(), "signal csv: t and x must be aligned");
  os << "t,re,im\n";
  for (std::size_t j = 0; j < t.size(); ++j)
    os << format_double(t[j]) << ',' << format_double(x[j].real()) << ','
       << format_double(x[j].imag()) << '\n';
}

/// Spectrum dump: `omega_rad_s,re,im`.
inline void write_spectrum_csv(std::ostream& os, std::span<const double> omega,
                               std::span<const cdouble> X) {
  require(omega.size() == X.size(), "spectrum csv: omega and X must be aligned");
  os << "omega_rad_s,re,im\n";
  for (std::size_t j = 0; j < omega.size(); ++j)
    os << format_double(omega[j]) << ',' << format_double(X[j].real()) << ','
       << format_double(X[j].imag()) << '\n';
}

/// Channel-sample dump: `channel,k,re,im` (one row per sample, row-major).
inline void write_samples_csv(std::ostream& os, const CMat& Y) {
  os << "channel,k,re,im\n";
  for (Eigen::Index i = 0; i < Y.rows(); ++i)
    for (Eigen::Index k = 0; k < Y.cols(); ++k)
      os << i << ',' << k << ',' << format_double(Y(i, k).real()) << ','
         << format_double(Y(i, k).imag()) << '\n';
}

/// Per-trial table: `sweep_value,trial,seed,error,support_ok`.
inline void write_trials_csv(std::ostream& os,
                             std::span<const ExperimentRecord> records) {
  os << "sweep_value,trial,seed,error,support_ok\n";
  for (const auto& rec : records)
    for (const auto& t : rec.trials)
      os << format_double(rec.sweep_value) << ',' << t.trial << ',' << t.seed
         << ',' << format_double(t.error) << ',' << int(t.support_ok) << '\n';
}

/// Summary table: `sweep_value,mean,p10,p50,p90,success_rate`.
inline void write_summary_csv(std::ostream& os,
                              std::span<const ExperimentRecord> records) {
  os << "sweep_value,mean,p10,p50,p90,success_rate\n";
  for (const auto& rec : records)
    os << format_double(rec.sweep_value) << ',' << format_double(rec.mean_error)
       << ',' << format_double(rec.p10) << ',' << format_double(rec.p50) << ','
       << format_double(rec.p90) << ',' << format_double(rec.success_rate)
       << '\n';
}

// ---------------------------------------------------------------------------
// Recovery results
// ---------------------------------------------------------------------------

/// JSON form: support array, coefficients as nested [re, im] pairs (row r
/// follows support[r]), residual, iteration count.
inline json to_json(const RecoveryResult& r) {
  json coeffs = json::array();
  for (Eigen::Index i = 0; i < r.coeffs.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index v = 0; v < r.coeffs.cols(); ++v)
      row.push_back({r.coeffs(i, v).real(), r.coeffs(i, v).imag()});
    coeffs.push_back(std::move(row));
  }
  return json{{"support", r.support},
              {"coeffs", std::move(coeffs)},
              {"residual", r.residual_norm},
              {"iterations", r.iterations},
              {"converged", r.converged}};
}

// ---------------------------------------------------------------------------
// Experiment configs
// ---------------------------------------------------------------------------

inline json to_json(const BumpFamily& b) {
  return json{{"count", {b.min_count, b.max_count}},
              {"halfwidth", {b.min_halfwidth, b.max_halfwidth}},
              {"amp", {b.min_amp, b.max_amp}},
              {"spikes", {b.min_spikes, b.max_spikes}},
              {"spike_halfwidth", {b.min_spike_halfwidth, b.max_spike_halfwidth}},
              {"spike_amp", {b.min_spike_amp, b.max_spike_amp}}};
}

/// Full config echo. Sections mirror the system each field belongs to, so
/// dotted overrides read naturally (`mwc.q_prime=25`, `rd.N=64`, ...).
inline json to_json(const ExperimentConfig& c) {
  json intervals = json::array();
  for (const auto& [lo, hi] : c.blk_intervals) intervals.push_back({lo, hi});
  return json{
      {"experiment", to_string(c.id)},
      {"seed", c.seed},
      {"trials", c.trials},
      {"jobs", c.jobs},
      {"sweep", c.sweep},
      {"amplitude_mode",
       c.amplitude_mode == AmplitudeMode::equal ? "equal" : "random"},
      {"mwc",
       {{"T", c.T},
        {"W_prime", c.Wp},
        {"L_prime", c.Lp},
        {"M_prime", c.Mp},
        {"omega", c.omega},
        {"bands", c.bands},
        {"fidelity_R", c.fidelity_R},
        {"q_prime", c.qp_list}}},
      {"rd",
       {{"T", c.rd_T},
        {"N", c.rd_N},
        {"M", c.rd_M},
        {"K", c.rd_K},
        {"R", c.rd_R}}},
      {"block",
       {{"T", c.blk_T},
        {"q", c.blk_q},
        {"L", c.blk_L},
        {"M", c.blk_M},
        {"D", c.blk_D},
        {"rate", c.blk_rate},
        {"intervals", std::move(intervals)},
        {"bumps", to_json(c.blk_bumps)}}}};
}

namespace detail {

[[noreturn]] inline void config_fail(const std::string& path,
                                     const std::string& what) {
  throw std::invalid_argument("config: " + path + ": " + what);
}

inline double get_double(const json& v, const std::string& path) {
  if (!v.is_number()) config_fail(path, "expected a number");
  return v.get<double>();
}

inline std::int64_t get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) config_fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

inline std::uint64_t get_u64(const json& v, const std::string& path) {
  if (!(v.is_number_unsigned() ||
        (v.is_number_integer() && v.get<std::int64_t>() >= 0)))
    config_fail(path, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

/// Scalars promote to one-element lists so `mwc.q_prime=25` works.
inline std::vector<double> get_doubles(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) config_fail(path, "expected a number or array");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(get_double(e, path));
  return out;
}

inline std::vector<std::int64_t> get_ints(const json& v,
                                          const std::string& path) {
  if (v.is_number_integer()) return {v.get<std::int64_t>()};
  if (!v.is_array()) config_fail(path, "expected an integer or array");
  std::vector<std::int64_t> out;
  for (const auto& e : v) out.push_back(get_int(e, path));
  return out;
}

inline std::pair<double, double> get_range(const json& v,
                                           const std::string& path) {
  if (!v.is_array() || v.size() != 2) config_fail(path, "expected [lo, hi]");
  return {get_double(v[0], path), get_double(v[1], path)};
}

inline std::pair<int, int> get_int_range(const json& v,
                                         const std::string& path) {
  if (!v.is_array() || v.size() != 2) config_fail(path, "expected [lo, hi]");
  return {int(get_int(v[0], path)), int(get_int(v[1], path))};
}

inline void parse_bumps(const json& j, const std::string& path, BumpFamily& b) {
  if (!j.is_object()) config_fail(path, "expected an object");
  for (const auto& [key, v] : j.items()) {
    const std::string p = path + "." + key;
    if (key == "count") {
      std::tie(b.min_count, b.max_count) = get_int_range(v, p);
    } else if (key == "halfwidth") {
      std::tie(b.min_halfwidth, b.max_halfwidth) = get_range(v, p);
    } else if (key == "amp") {
      std::tie(b.min_amp, b.max_amp) = get_range(v, p);
    } else if (key == "spikes") {
      std::tie(b.min_spikes, b.max_spikes) = get_int_range(v, p);
    } else if (key == "spike_halfwidth") {
      std::tie(b.min_spike_halfwidth, b.max_spike_halfwidth) = get_range(v, p);
    } else if (key == "spike_amp") {
      std::tie(b.min_spike_amp, b.max_spike_amp) = get_range(v, p);
    } else {
      config_fail(p, "unknown key");
    }
  }
}

}  // namespace detail

/// Applies the keys present in `j` on top of `cfg` (missing keys keep their
/// current values). Unknown keys and type mismatches throw invalid_argument
/// naming the offending path. An `experiment` key must agree with cfg.id.
inline void config_from_json(const json& j, ExperimentConfig& cfg) {
  using detail::config_fail;
  if (!j.is_object()) config_fail("<root>", "expected a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "experiment") {
      if (!v.is_string()) config_fail(key, "expected a string");
      ExperimentId id{};
      if (!experiment_from_string(v.get<std::string>(), id))
        config_fail(key, "unknown experiment '" + v.get<std::string>() + "'");
      if (id != cfg.id)
        config_fail(key, "config names '" + v.get<std::string>() +
                             "' but the run targets '" + to_string(cfg.id) +
                             "'");
    } else if (key == "seed") {
      cfg.seed = detail::get_u64(v, key);
    } else if (key == "trials") {
      cfg.trials = detail::get_int(v, key);
    } else if (key == "jobs") {
      cfg.jobs = int(detail::get_int(v, key));
    } else if (key == "sweep") {
      cfg.sweep = detail::get_doubles(v, key);
    } else if (key == "amplitude_mode") {
      if (!v.is_string()) config_fail(key, "expected a string");
      const auto s = v.get<std::string>();
      if (s == "equal") cfg.amplitude_mode = AmplitudeMode::equal;
      else if (s == "random") cfg.amplitude_mode = AmplitudeMode::random;
      else config_fail(key, "expected 'equal' or 'random'");
    } else if (key == "mwc") {
      if (!v.is_object()) config_fail(key, "expected an object");
      for (const auto& [mk, mv] : v.items()) {
        const std::string p = key + "." + mk;
        if (mk == "T") cfg.T = detail::get_double(mv, p);
        else if (mk == "W_prime") cfg.Wp = detail::get_double(mv, p);
        else if (mk == "L_prime") cfg.Lp = detail::get_int(mv, p);
        else if (mk == "M_prime") cfg.Mp = detail::get_double(mv, p);
        else if (mk == "omega") cfg.omega = detail::get_int(mv, p);
        else if (mk == "bands") cfg.bands = detail::get_int(mv, p);
        else if (mk == "fidelity_R") cfg.fidelity_R = int(detail::get_int(mv, p));
        else if (mk == "q_prime") cfg.qp_list = detail::get_ints(mv, p);
        else config_fail(p, "unknown key");
      }
    } else if (key == "rd") {
      if (!v.is_object()) config_fail(key, "expected an object");
      for (const auto& [rk, rv] : v.items()) {
        const std::string p = key + "." + rk;
        if (rk == "T") cfg.rd_T = detail::get_double(rv, p);
        else if (rk == "N") cfg.rd_N = detail::get_int(rv, p);
        else if (rk == "M") cfg.rd_M = detail::get_int(rv, p);
        else if (rk == "K") cfg.rd_K = detail::get_int(rv, p);
        else if (rk == "R") cfg.rd_R = int(detail::get_int(rv, p));
        else config_fail(p, "unknown key");
      }
    } else if (key == "block") {
      if (!v.is_object()) config_fail(key, "expected an object");
      for (const auto& [bk, bv] : v.items()) {
        const std::string p = key + "." + bk;
        if (bk == "T") cfg.blk_T = detail::get_double(bv, p);
        else if (bk == "q") cfg.blk_q = detail::get_int(bv, p);
        else if (bk == "L") cfg.blk_L = detail::get_int(bv, p);
        else if (bk == "M") cfg.blk_M = detail::get_int(bv, p);
        else if (bk == "D") cfg.blk_D = detail::get_int(bv, p);
        else if (bk == "rate") cfg.blk_rate = detail::get_double(bv, p);
        else if (bk == "intervals") {
          if (!bv.is_array()) config_fail(p, "expected an array of [lo, hi]");
          cfg.blk_intervals.clear();
          for (const auto& iv : bv)
            cfg.blk_intervals.push_back(detail::get_range(iv, p));
        } else if (bk == "bumps") {
          detail::parse_bumps(bv, p, cfg.blk_bumps);
        } else {
          config_fail(p, "unknown key");
        }
      }
    } else {
      config_fail(key, "unknown key");
    }
  }
}

/// Applies one `dotted.path=value` override onto a config JSON document.
/// The value is parsed as JSON when possible, else taken as a string.
inline void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string_view::npos && eq > 0,
          "override must look like key.path=value (got '" +
              std::string(assignment) + "')");
  std::string_view path = assignment.substr(0, eq);
  const std::string value(assignment.substr(eq + 1));

  json* node = &doc;
  while (true) {
    const auto dot = path.find('.');
    const std::string key(path.substr(0, dot));
    require(!key.empty(), "override has an empty path segment");
    if (dot == std::string_view::npos) {
      (*node)[key] = json::accept(value) ? json::parse(value) : json(value);
      return;
    }
    node = &(*node)[key];
    if (!node->is_object() && !node->is_null())
      throw std::invalid_argument("override path '" + key +
                                  "' collides with a non-object value");
    path.remove_prefix(dot + 1);
  }
}

/// FNV-1a 64-bit over the canonical (key-sorted, compact) dump.
inline std::string config_hash(const json& j) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  for (int i = 15; i >= 0; --i, h >>= 4) buf[i] = "0123456789abcdef"[h & 0xf];
  buf[16] = '\0';
  return std::string(buf, 16);
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

inline std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Written last in a run, so its presence certifies the listed outputs.
struct RunManifest {
  std::string tool_version = kVersion;
  std::string config_hash;
  json config;  // full echo of the effective config
  std::string created_utc;
  std::vector<std::pair<std::string, double>> stages;  // name -> seconds
  std::vector<std::string> outputs;                    // paths as written
  json results = json::object();  // headline numbers (experiment-specific)
};

inline json to_json(const RunManifest& m) {
  json stages = json::array();
  for (const auto& [name, seconds] : m.stages)
    stages.push_back({{"name", name}, {"seconds", seconds}});
  return json{{"tool_version", m.tool_version},
              {"config_hash", m.config_hash},
              {"config", m.config},
              {"created_utc", m.created_utc},
              {"stages", std::move(stages)},
              {"outputs", m.outputs},
              {"results", m.results}};
}

}  // namespace subnyq
