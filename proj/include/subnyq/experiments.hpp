#pragma once

// The four experiments as reproducible, seeded sweeps. Every trial derives
// its own seed from (config seed, experiment tag, sweep point, trial index),
// so results are bit-identical for a given config regardless of trial
// execution order or the --jobs setting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "subnyq/common.hpp"
#include "subnyq/linear_systems.hpp"
#include "subnyq/metrics.hpp"
#include "subnyq/recovery.hpp"
#include "subnyq/rng.hpp"
#include "subnyq/samplers.hpp"
#include "subnyq/signals.hpp"

namespace subnyq {

enum class ExperimentId { channel_sweep, windowing, block_demo, basis_mismatch };

inline std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::channel_sweep: return "channel-sweep";
    case ExperimentId::windowing: return "windowing";
    case ExperimentId::block_demo: return "block-demo";
    case ExperimentId::basis_mismatch: return "basis-mismatch";
  }
  return "unknown";
}

inline bool experiment_from_string(std::string_view s, ExperimentId& out) {
  for (auto id : {ExperimentId::channel_sweep, ExperimentId::windowing,
                  ExperimentId::block_demo, ExperimentId::basis_mismatch})
    if (s == to_string(id)) {
      out = id;
      return true;
    }
  return false;
}

struct ExperimentConfig {
  ExperimentId id = ExperimentId::channel_sweep;
  std::uint64_t seed = 2026;
  std::int64_t trials = 100;
  int jobs = 0;  // <= 0: machine parallelism
  std::vector<double> sweep;  // q' values | durations (s) | deltas (s)
  AmplitudeMode amplitude_mode = AmplitudeMode::equal;

  // Multiband / MWC system (channel sweep, windowing).
  double Wp = 500.0;     // W' (Hz)
  std::int64_t Lp = 50;  // L' (slices per period)
  double Mp = 20.0;      // M' (decimation)
  double T = 4.0;        // observation interval (s)
  std::int64_t omega = 3;   // planted band pairs, channel sweep
  std::int64_t bands = 4;   // planted band pairs, windowing
  int fidelity_R = 16;      // simulated front-end grid = fidelity_R * W' Hz
  std::vector<std::int64_t> qp_list = {20, 50};  // windowing channel counts

  // RD system (basis mismatch).
  std::int64_t rd_N = 128, rd_M = 32, rd_K = 3;
  double rd_T = 1.0;
  int rd_R = 32;

  // Block-sparse demo.
  std::int64_t blk_q = 8, blk_L = 10, blk_M = 40, blk_D = 40;
  double blk_T = 1.0;
  double blk_rate = 8000.0;  // dense simulation rate (Hz)
  std::vector<std::pair<double, double>> blk_intervals = {
      {0.2, 0.3}, {0.4, 0.5}, {0.6, 0.7}};
  BumpFamily blk_bumps;
};

/// Paper-parameter defaults for each experiment (a bare run reproduces the
/// paper-scale sweep; --reduced switches to the desk-scale trial counts).
inline ExperimentConfig default_config(ExperimentId id) {
  ExperimentConfig cfg;
  cfg.id = id;
  switch (id) {
    case ExperimentId::channel_sweep:
      cfg.trials = 100;
      cfg.sweep = {10, 12, 14, 16, 18, 20, 22, 25, 28, 32, 36, 40, 45};
      break;
    case ExperimentId::windowing:
      cfg.trials = 50;
      cfg.T = 2.0;
      cfg.amplitude_mode = AmplitudeMode::random;
      cfg.fidelity_R = 32;  // keep the front-end floor below the breakdown
      cfg.sweep = {2.0, 1.5, 1.0, 0.7, 0.5, 0.4, 0.3, 0.2, 0.1};
      break;
    case ExperimentId::block_demo:
      cfg.trials = 1;
      cfg.sweep = {0.0};
      // Main bumps carry the energy; the narrow spikes stretch the essential
      // bandwidth to ~1 kHz so the 400 Hz sampler runs ~5x below Nyquist.
      cfg.blk_bumps.min_count = 2;
      cfg.blk_bumps.max_count = 3;
      cfg.blk_bumps.min_spikes = 1;
      cfg.blk_bumps.max_spikes = 2;
      cfg.blk_bumps.min_spike_halfwidth = 0.00035;
      cfg.blk_bumps.max_spike_halfwidth = 0.0006;
      cfg.blk_bumps.min_spike_amp = 0.35;
      cfg.blk_bumps.max_spike_amp = 0.6;
      break;
    case ExperimentId::basis_mismatch:
      cfg.trials = 50;
      cfg.sweep = {0.0, 1.0e-3, 1.0e-2, 1.0e-1};  // delta seconds (rd_T = 1)
      break;
  }
  return cfg;
}

inline void apply_reduced_scale(ExperimentConfig& cfg) {
  switch (cfg.id) {
    case ExperimentId::channel_sweep: cfg.trials = 20; break;
    case ExperimentId::windowing: cfg.trials = 10; break;
    case ExperimentId::block_demo: cfg.trials = 1; break;
    case ExperimentId::basis_mismatch: cfg.trials = 50; break;
  }
}

struct TrialResult {
  std::int64_t trial = 0;
  std::uint64_t seed = 0;
  double error = 0.0;
  bool support_ok = false;
};

struct ExperimentRecord {
  std::string label;  // distinguishes side-by-side curves (e.g. "q20")
  double sweep_value = 0.0;
  std::vector<TrialResult> trials;
  double mean_error = 0.0, p10 = 0.0, p50 = 0.0, p90 = 0.0;
  double success_rate = 0.0;
};

inline void summarize(ExperimentRecord& rec) {
  require(!rec.trials.empty(), "summarize: record has no trials");
  std::vector<double> errs;
  errs.reserve(rec.trials.size());
  double mean = 0.0, succ = 0.0;
  for (const auto& t : rec.trials) {
    errs.push_back(t.error);
    mean += t.error;
    succ += t.support_ok ? 1.0 : 0.0;
  }
  rec.mean_error = mean / double(rec.trials.size());
  rec.success_rate = succ / double(rec.trials.size());
  rec.p10 = quantile(errs, 0.10);
  rec.p50 = quantile(errs, 0.50);
  rec.p90 = quantile(errs, 0.90);
}

namespace detail {

/// Trial loop: slot-indexed writes keep results independent of the job count.
inline void run_trials(std::int64_t total, int jobs,
                       const std::function<void(std::int64_t)>& fn) {
  parallel_for(std::size_t(total), jobs > 0 ? unsigned(jobs) : 0u,
               [&](std::size_t i) { fn(std::int64_t(i)); });
}

/// Seeds are keyed by the sweep point's *value* (not its index), so the same
/// point yields the same trials no matter which other points share the sweep.
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t tag,
                                std::uint64_t point, std::uint64_t trial) {
  return Rng::keyed(base, {tag, point, trial}).next_u64();
}

inline std::uint64_t point_key(double value, std::uint64_t scale = 1000000) {
  return std::uint64_t(std::llround(value * double(scale)));
}

/// Number of usable positive shift indices: m in [1, hi]. The DC slice
/// (m = 0, self-conjugate) and — for even L' — the edge slice m = L'/2
/// (band would touch +-pi*W') are excluded.
inline std::int64_t positive_slice_count(std::int64_t Lp) {
  return (Lp - 1) / 2;
}

/// Sensing-matrix row holding shift index m (inverse of mwc_shift_index).
inline std::int64_t slice_row(std::int64_t m, std::int64_t Lp) {
  return m + (Lp + 1) / 2 - 1;
}

struct PlantedMultiband {
  std::vector<cdouble> grid;         // real-valued Hermitian signal (imag 0)
  std::set<std::int64_t> slices;     // the 2*pairs occupied sensing rows
};

/// Real multiband input: `pairs` band positions drawn uniformly without
/// replacement among the positive shift indices; the Hermitian mirrors are
/// implied by taking 2*Re of the positive-frequency draw. Bands are centered
/// pulses of `width_frac` of a slice; keeping width_frac < 1 leaves a guard
/// band so a band's bins (and their conjugate mirrors) stay strictly inside
/// the +-m slice pair.
inline PlantedMultiband plant_real_multiband(Rng& rng,
                                             const ExperimentConfig& cfg,
                                             std::int64_t pairs, double T,
                                             double width_frac) {
  const std::int64_t hi = positive_slice_count(cfg.Lp);
  require(pairs >= 1 && pairs <= hi,
          "plant_real_multiband: band pairs exceed the positive slices");
  require(width_frac > 0.0 && width_frac < 1.0,
          "plant_real_multiband: width fraction must lie in (0, 1)");
  const double wp = 2.0 * kPi * cfg.Wp / double(cfg.Lp);
  auto picks = rng.distinct(std::size_t(hi), std::size_t(pairs));
  std::vector<std::pair<double, double>> bands;
  std::vector<double> amps;
  PlantedMultiband out;
  for (auto pk : picks) {
    const std::int64_t m = std::int64_t(pk) + 1;  // slice pair -m / +m
    bands.push_back({wp * (double(m) - width_frac / 2.0),
                     wp * (double(m) + width_frac / 2.0)});
    amps.push_back(cfg.amplitude_mode == AmplitudeMode::equal
                       ? 1.0
                       : rng.uniform(0.25, 1.0));
    out.slices.insert(slice_row(-m, cfg.Lp));
    out.slices.insert(slice_row(m, cfg.Lp));
  }
  auto sig = gen_multiband(bands, amps, cfg.Wp, T, cfg.fidelity_R,
                           rng.next_u64(), cfg.amplitude_mode);
  out.grid.resize(sig.grid.size());
  for (std::size_t j = 0; j < sig.grid.size(); ++j)
    out.grid[j] = cdouble(2.0 * sig.grid[j].real(), 0.0);
  return out;
}

inline std::set<std::int64_t> support_set(const RecoveryResult& res) {
  return {res.support.begin(), res.support.end()};
}

}  // namespace detail

/// Reconstruction error vs. number of channels q' (fresh chip matrix per
/// trial). Real equal-amplitude inputs put the S-OMP knee near
/// q' = 2*(2*omega)*ln(L')/2; the reported error of successful trials sits
/// on the simulated front end's fidelity floor (~(pi*m/(R*L'))^2 per slice).
inline std::vector<ExperimentRecord> exp_channel_sweep(
    const ExperimentConfig& cfg) {
  require(!cfg.sweep.empty(), "channel-sweep: empty sweep");
  require(cfg.trials >= 1, "channel-sweep: trials must be >= 1");
  std::vector<ExperimentRecord> records(cfg.sweep.size());
  for (std::size_t pi = 0; pi < cfg.sweep.size(); ++pi) {
    const auto qp = require_integer(cfg.sweep[pi], "channel-sweep: q'");
    require(qp >= 1, "channel-sweep: q' must be >= 1");
    if (double(qp) >= cfg.Mp)
      std::cerr << "channel-sweep: warning: q'=" << qp << " >= M'=" << cfg.Mp
                << " leaves the sub-Nyquist regime; running the point anyway\n";
    auto& rec = records[pi];
    rec.sweep_value = double(qp);
    rec.trials.resize(std::size_t(cfg.trials));
    detail::run_trials(cfg.trials, cfg.jobs, [&](std::int64_t t) {
      const auto seed = detail::trial_seed(cfg.seed, 0x63686e6cULL,
                                           std::uint64_t(qp), std::uint64_t(t));
      Rng rng(seed);
      auto planted =
          detail::plant_real_multiband(rng, cfg, cfg.omega, cfg.T, 0.5);
      auto mwc = make_mwc_config(cfg.Wp, cfg.Lp, cfg.Mp, qp, rng.next_u64());
      auto Y = mwc_sample_grid(planted.grid, mwc, cfg.fidelity_R);
      auto sys = build_mwc_mmv(Y, mwc);
      auto res = somp(sys.A, sys.Y, 2 * cfg.omega);
      auto xhat = synthesize_multiband(res, mwc, cfg.T, planted.grid.size());
      rec.trials[std::size_t(t)] = {
          t, seed, avg_squared_error(planted.grid, xhat, cfg.T, cfg.Wp),
          detail::support_set(res) == planted.slices};
    });
    summarize(rec);
  }
  return records;
}

/// Reconstruction error vs. signal duration at each q' in qp_list. The
/// planted multiband signal is windowed to a centered sub-interval before
/// sampling; the error is measured against the windowed truth. Windowing
/// spreads the spectrum across slices, so S-OMP runs with the full
/// measurement budget K = min(L', q'-1); its residual tolerance stops it at
/// the true support when the signal is not actually spread. A trial counts
/// as a success when the recovered support contains all planted slices.
inline std::vector<ExperimentRecord> exp_windowing(const ExperimentConfig& cfg) {
  require(!cfg.sweep.empty(), "windowing: empty sweep");
  require(cfg.trials >= 1, "windowing: trials must be >= 1");
  require(!cfg.qp_list.empty(), "windowing: empty q' list");
  std::vector<ExperimentRecord> records;
  for (std::size_t qi = 0; qi < cfg.qp_list.size(); ++qi) {
    const std::int64_t qp = cfg.qp_list[qi];
    require(qp >= 2, "windowing: q' must be >= 2");
    if (double(qp) >= cfg.Mp)
      std::cerr << "windowing: warning: q'=" << qp << " >= M'=" << cfg.Mp
                << " leaves the sub-Nyquist regime; running the point anyway\n";
    const std::int64_t K = std::min(cfg.Lp, qp - 1);
    for (std::size_t di = 0; di < cfg.sweep.size(); ++di) {
      const double dur = cfg.sweep[di];
      require(dur > 0.0 && dur <= cfg.T + 1e-12,
              "windowing: duration must lie in (0, T]");
      ExperimentRecord rec;
      rec.label = "q" + std::to_string(qp);
      rec.sweep_value = dur;
      rec.trials.resize(std::size_t(cfg.trials));
      const std::uint64_t point =
          (std::uint64_t(qp) << 32) ^ detail::point_key(dur);
      detail::run_trials(cfg.trials, cfg.jobs, [&](std::int64_t t) {
        const auto seed =
            detail::trial_seed(cfg.seed, 0x77696e64ULL, point, std::uint64_t(t));
        Rng rng(seed);
        auto planted =
            detail::plant_real_multiband(rng, cfg, cfg.bands, cfg.T, 0.9);
        // centered window
        const double offset = (cfg.T - dur) / 2.0;
        const double rate = double(planted.grid.size()) / cfg.T;
        for (std::size_t j = 0; j < planted.grid.size(); ++j) {
          const double tt = double(j) / rate;
          if (tt < offset || tt >= offset + dur) planted.grid[j] = 0.0;
        }
        auto mwc = make_mwc_config(cfg.Wp, cfg.Lp, cfg.Mp, qp, rng.next_u64());
        auto Y = mwc_sample_grid(planted.grid, mwc, cfg.fidelity_R);
        auto sys = build_mwc_mmv(Y, mwc);
        auto res = somp(sys.A, sys.Y, K);
        auto xhat = synthesize_multiband(res, mwc, cfg.T, planted.grid.size());
        auto got = detail::support_set(res);
        bool recall = true;
        for (auto s : planted.slices) recall = recall && got.count(s) > 0;
        rec.trials[std::size_t(t)] = {
            t, seed, avg_squared_error(planted.grid, xhat, cfg.T, cfg.Wp),
            recall};
      });
      summarize(rec);
      records.push_back(std::move(rec));
    }
  }
  return records;
}

struct BlockDemoResult {
  ExperimentRecord record;  // error = normalized squared error per trial
  // Dumps from the first trial:
  std::vector<double> times, x, xhat;
  CMat samples;  // q x M channel samples (real data in the real part)
  // Rate audit:
  double sample_rate_hz = 0.0;        // L*M/T achieved by the sampler
  double essential_bw_hz = 0.0;       // 99.9%-energy bandwidth of the input
  double nyquist_equivalent_hz = 0.0; // 2 * essential bandwidth
  double rate_reduction = 0.0;        // nyquist equivalent / achieved
};

/// Full block-sparse pipeline on the bump test signal; records the
/// normalized squared error and dumps the signals for plotting.
inline BlockDemoResult exp_block_demo(const ExperimentConfig& cfg) {
  require(cfg.trials >= 1, "block-demo: trials must be >= 1");
  require(cfg.blk_D == cfg.blk_M, "block-demo: requires D = M");
  const auto n = static_cast<std::size_t>(
      require_integer(cfg.blk_rate * cfg.blk_T, "block-demo: rate * T"));
  // Active segments: those intersecting a support interval.
  const double seg = cfg.blk_T / double(cfg.blk_L);
  std::set<std::int64_t> active;
  for (const auto& [a, b] : cfg.blk_intervals)
    for (std::int64_t l = 0; l < cfg.blk_L; ++l) {
      const double lo = double(l) * seg, hi = double(l + 1) * seg;
      if (a < hi - 1e-12 && b > lo + 1e-12) active.insert(l);
    }
  require(!active.empty(), "block-demo: no active segments");
  const auto K = std::int64_t(active.size());

  BlockDemoResult out;
  out.record.sweep_value = 0.0;
  out.record.trials.resize(std::size_t(cfg.trials));
  std::mutex dump_mutex;
  detail::run_trials(cfg.trials, cfg.jobs, [&](std::int64_t t) {
    const auto seed =
        detail::trial_seed(cfg.seed, 0x626c6f63ULL, 0, std::uint64_t(t));
    Rng rng(seed);
    auto sig = gen_block_sparse(cfg.blk_intervals, cfg.blk_T, cfg.blk_rate,
                                cfg.blk_bumps, rng.next_u64());
    auto bcfg = make_block_config(cfg.blk_T, cfg.blk_L, cfg.blk_M, cfg.blk_q,
                                  rng.next_u64());
    auto Y = block_sample(sig, bcfg);
    auto bsys = build_block_system(Y, bcfg);
    CMat Phi = bsys.Phi.cast<cdouble>();
    auto res = somp(Phi, bsys.rhs, K);
    auto Ahat = scatter_rows(res, cfg.blk_L);
    auto xhat = synthesize_block(Ahat, bcfg, n);
    const double nse = normalized_squared_error(sig.grid, xhat);
    out.record.trials[std::size_t(t)] = {t, seed, nse,
                                         detail::support_set(res) == active};
    if (t == 0) {
      std::lock_guard lk(dump_mutex);
      out.times.resize(n);
      for (std::size_t j = 0; j < n; ++j)
        out.times[j] = double(j) / cfg.blk_rate;
      out.x = sig.grid;
      out.xhat = xhat;
      out.samples = Y;
      out.sample_rate_hz = bcfg.sample_rate();
      out.essential_bw_hz = essential_bandwidth(sig.grid, cfg.blk_rate, 0.999);
      out.nyquist_equivalent_hz = 2.0 * out.essential_bw_hz;
      out.rate_reduction = out.nyquist_equivalent_hz / out.sample_rate_hz;
    }
  });
  summarize(out.record);
  return out;
}

/// RD sensitivity to basis mismatch: tones at frequencies n/(T+delta) while
/// the system models period T; delta = 0 is the matched control.
inline std::vector<ExperimentRecord> exp_basis_mismatch(
    const ExperimentConfig& cfg) {
  require(!cfg.sweep.empty(), "basis-mismatch: empty sweep");
  require(cfg.trials >= 1, "basis-mismatch: trials must be >= 1");
  require(cfg.rd_N >= 4 && cfg.rd_N % 2 == 0, "basis-mismatch: N must be even");
  require(cfg.rd_K >= 1 && cfg.rd_K <= cfg.rd_N - 2, "basis-mismatch: bad K");
  const double W = double(cfg.rd_N) / cfg.rd_T;
  // Closed dense grid over [0,T]: R*N+1 points, as rd_sample_grid requires.
  const auto steps = std::size_t(cfg.rd_R) * std::size_t(cfg.rd_N);
  const auto n = steps + 1;
  std::vector<ExperimentRecord> records(cfg.sweep.size());
  for (std::size_t pi = 0; pi < cfg.sweep.size(); ++pi) {
    const double delta = cfg.sweep[pi];
    require(delta >= 0.0 && delta < cfg.rd_T,
            "basis-mismatch: delta must lie in [0, T)");
    auto& rec = records[pi];
    rec.sweep_value = delta;
    rec.trials.resize(std::size_t(cfg.trials));
    const std::uint64_t point = detail::point_key(delta, 1000000000);
    detail::run_trials(cfg.trials, cfg.jobs, [&](std::int64_t t) {
      const auto seed =
          detail::trial_seed(cfg.seed, 0x6d69736dULL, point, std::uint64_t(t));
      Rng rng(seed);
      // Harmonic indices in [-N/2 + 1, N/2 - 1]; the true tone sits at
      // omega = 2 pi n_k / (T + delta).
      auto picks = rng.distinct(std::size_t(cfg.rd_N - 1), std::size_t(cfg.rd_K));
      std::set<std::int64_t> want;
      std::vector<std::int64_t> harmonics;
      std::vector<cdouble> coeffs;
      for (auto pk : picks) {
        const std::int64_t nk = -cfg.rd_N / 2 + 1 + std::int64_t(pk);
        harmonics.push_back(nk);
        coeffs.push_back(rng.cnormal());
        want.insert(nk + cfg.rd_N / 2);
      }
      std::vector<cdouble> x(n, cdouble{0, 0});
      std::vector<double> times(n);
      for (std::size_t j = 0; j < n; ++j) {
        const double tt = cfg.rd_T * double(j) / double(steps);
        times[j] = tt;
        for (std::size_t k = 0; k < harmonics.size(); ++k)
          x[j] += coeffs[k] * std::polar(1.0, 2.0 * kPi * double(harmonics[k]) *
                                                  tt / (cfg.rd_T + delta));
      }
      auto rdc = make_rd_config(cfg.rd_T, W, cfg.rd_M, rng.next_u64());
      auto y = rd_sample_grid(x, rdc, cfg.rd_R);
      auto sys = build_rd_smv(rdc);
      auto res = omp(sys.A, y, cfg.rd_K);
      auto xhat = unweight_and_synthesize_multitone(res, sys.weights, rdc, times);
      rec.trials[std::size_t(t)] = {
          t, seed, avg_squared_error(x, xhat, cfg.rd_T, W),
          detail::support_set(res) == want};
    });
    summarize(rec);
  }
  return records;
}

// ---------------------------------------------------------------------------
// Config validation (shared by the CLI's `validate` and `run` verbs)
// ---------------------------------------------------------------------------

struct ConstraintCheck {
  std::string name;
  bool pass = true;
  bool advisory = false;  // reported, but `run` proceeds with a warning
  std::string detail;
};

inline std::vector<ConstraintCheck> validate_config(const ExperimentConfig& cfg) {
  std::vector<ConstraintCheck> checks;
  auto add = [&](std::string name, bool pass, std::string detail,
                 bool advisory = false) {
    checks.push_back({std::move(name), pass, advisory, std::move(detail)});
  };
  add("trials >= 1", cfg.trials >= 1, "trials = " + std::to_string(cfg.trials));
  add("sweep nonempty", !cfg.sweep.empty(),
      "sweep points = " + std::to_string(cfg.sweep.size()));

  // RD section.
  add("M < N", cfg.rd_M < cfg.rd_N,
      "M = " + std::to_string(cfg.rd_M) + ", N = " + std::to_string(cfg.rd_N));
  add("N mod M = 0", cfg.rd_M >= 1 && cfg.rd_N % std::max<std::int64_t>(cfg.rd_M, 1) == 0,
      "N = " + std::to_string(cfg.rd_N) + ", M = " + std::to_string(cfg.rd_M));
  add("N even", cfg.rd_N % 2 == 0, "N = " + std::to_string(cfg.rd_N));

  // MWC section.
  add("M' <= L'", cfg.Mp <= double(cfg.Lp),
      "M' = " + std::to_string(cfg.Mp) + ", L' = " + std::to_string(cfg.Lp));
  {
    bool all_sub = true;
    if (cfg.id == ExperimentId::channel_sweep)
      for (double q : cfg.sweep) all_sub = all_sub && q < cfg.Mp;
    if (cfg.id == ExperimentId::windowing)
      for (auto q : cfg.qp_list) all_sub = all_sub && double(q) < cfg.Mp;
    add("q' < M'", all_sub,
        "points at or above M' run with a warning (model leaves the "
        "sub-Nyquist regime)",
        /*advisory=*/true);
  }
  {
    const bool grids_align =
        cfg.Wp > 0 && cfg.Lp >= 2 && cfg.Mp > 0 && cfg.T > 0 &&
        cfg.fidelity_R >= 2 &&
        std::abs(cfg.T * cfg.Wp / double(cfg.Lp) -
                 std::round(cfg.T * cfg.Wp / double(cfg.Lp))) < 1e-9 &&
        std::abs(cfg.T * cfg.Wp / cfg.Mp -
                 std::round(cfg.T * cfg.Wp / cfg.Mp)) < 1e-9;
    add("T*W'/L' and T*W'/M' integral", grids_align,
        "T = " + std::to_string(cfg.T) + ", W' = " + std::to_string(cfg.Wp));
  }
  {
    const std::int64_t hi = detail::positive_slice_count(cfg.Lp);
    const std::int64_t pairs =
        cfg.id == ExperimentId::windowing ? cfg.bands : cfg.omega;
    add("band validity", pairs >= 1 && pairs <= hi,
        std::to_string(pairs) + " band pairs among " + std::to_string(hi) +
            " positive slice positions");
  }

  // Block section.
  add("D = M", cfg.blk_D == cfg.blk_M,
      "D = " + std::to_string(cfg.blk_D) + ", M = " + std::to_string(cfg.blk_M));
  add("q <= L (block)", cfg.blk_q >= 1 && cfg.blk_q <= cfg.blk_L,
      "q = " + std::to_string(cfg.blk_q) + ", L = " + std::to_string(cfg.blk_L));

  // Sweep semantics differ per experiment; catching them here keeps the
  // `validate` verb in sync with the preconditions the runners enforce.
  switch (cfg.id) {
    case ExperimentId::channel_sweep: {
      bool ok = true;
      for (double q : cfg.sweep)
        ok = ok && q >= 1.0 && std::abs(q - std::round(q)) < 1e-9;
      add("sweep q' integral >= 1", ok,
          "channel counts must be whole numbers");
      break;
    }
    case ExperimentId::windowing: {
      bool dur_ok = true;
      for (double d : cfg.sweep) dur_ok = dur_ok && d > 0 && d <= cfg.T + 1e-12;
      add("durations in (0, T]", dur_ok, "T = " + std::to_string(cfg.T));
      bool qok = !cfg.qp_list.empty();
      for (auto q : cfg.qp_list) qok = qok && q >= 2;
      add("q' >= 2", qok, "each windowing curve needs >= 2 channels");
      break;
    }
    case ExperimentId::block_demo: {
      const double nd = cfg.blk_rate * cfg.blk_T;
      bool grid = cfg.blk_L >= 1 && cfg.blk_M >= 1 && nd > 0 &&
                  std::abs(nd - std::round(nd)) < 1e-9;
      if (grid) {
        const auto n = std::llround(nd);
        grid = n % (cfg.blk_L * cfg.blk_M) == 0 && n / (cfg.blk_L * cfg.blk_M) >= 1;
      }
      add("rate*T divisible by L*M (block)", grid,
          "rate*T = " + std::to_string(nd) + ", L*M = " +
              std::to_string(cfg.blk_L * cfg.blk_M));
      bool iv_ok = !cfg.blk_intervals.empty();
      auto sorted = cfg.blk_intervals;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto [a, b] = sorted[i];
        iv_ok = iv_ok && 0.0 <= a && a < b && b <= cfg.blk_T &&
                (i == 0 || sorted[i - 1].second <= a);
      }
      add("intervals disjoint within [0, T] (block)", iv_ok,
          std::to_string(cfg.blk_intervals.size()) + " support intervals");
      break;
    }
    case ExperimentId::basis_mismatch: {
      bool ok = true;
      for (double d : cfg.sweep) ok = ok && d >= 0.0 && d < cfg.rd_T;
      add("deltas in [0, T)", ok, "T = " + std::to_string(cfg.rd_T));
      add("1 <= K <= N-2", cfg.rd_K >= 1 && cfg.rd_K <= cfg.rd_N - 2,
          "K = " + std::to_string(cfg.rd_K) + ", N = " + std::to_string(cfg.rd_N));
      add("R even >= 2 (rd)", cfg.rd_R >= 2 && cfg.rd_R % 2 == 0,
          "R = " + std::to_string(cfg.rd_R));
      break;
    }
  }
  return checks;
}

}  // namespace subnyq
