// Signal models: sparse multitone, sparse multiband, block-sparse (time),
// and the +/-1 chipping sequences that drive every sampler.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "subnyq/common.hpp"
#include "subnyq/fft.hpp"
#include "subnyq/rng.hpp"

namespace subnyq {

// ---------------------------------------------------------------------------
// Chipping sequences
// ---------------------------------------------------------------------------

/// One +/-1 chip pattern: length N at rate W for the RD, length L' per MWC
/// channel (periodic), length L per block-sampler channel.
struct ChippingSequence {
  std::vector<int> values;  // entries in {+1,-1}
  double chip_rate = 0.0;   // Hz; chip l occupies [l/chip_rate, (l+1)/chip_rate)
  bool periodic = false;
  std::uint64_t seed = 0;

  std::size_t size() const { return values.size(); }

  int at(std::int64_t l) const {
    const auto n = static_cast<std::int64_t>(values.size());
    if (periodic) return values[static_cast<std::size_t>(((l % n) + n) % n)];
    // Non-periodic: clamp so the window endpoint t=T hits the last chip.
    return values[static_cast<std::size_t>(std::clamp<std::int64_t>(l, 0, n - 1))];
  }

  /// Piecewise-constant waveform value p(t).
  int at_time(double t) const {
    return at(static_cast<std::int64_t>(std::floor(t * chip_rate)));
  }
};

inline ChippingSequence gen_chipping(std::uint64_t seed, std::size_t length,
                                     double chip_rate, bool periodic) {
  require(length >= 1, "gen_chipping: length must be >= 1");
  ChippingSequence seq;
  seq.values.resize(length);
  seq.chip_rate = chip_rate;
  seq.periodic = periodic;
  seq.seed = seed;
  Rng rng = Rng::keyed(seed, {0x63686970ULL});  // "chip"
  for (auto& v : seq.values) v = rng.sign();
  return seq;
}

// ---------------------------------------------------------------------------
// Multitone model: x(t) = sum_{n in support} X(n) exp(j 2 pi n t / T), t in [0,T]
// ---------------------------------------------------------------------------

struct MultitoneSignal {
  double T = 0.0;                     // seconds
  double W = 0.0;                     // Hz, harmonic bound (N = T*W)
  std::int64_t N = 0;                 // time-frequency product, even
  std::vector<std::int64_t> support;  // harmonic indices in [-N/2, N/2-1]
  std::vector<cdouble> coeffs;        // X(n) per support entry

  std::size_t sparsity() const { return support.size(); }
};

inline MultitoneSignal make_multitone(double T, double W,
                                      std::vector<std::int64_t> support,
                                      std::vector<cdouble> coeffs) {
  require(T > 0 && W > 0, "multitone: T and W must be positive");
  MultitoneSignal sig;
  sig.T = T;
  sig.W = W;
  sig.N = require_integer(T * W, "multitone: N = T*W");
  require(sig.N > 0 && sig.N % 2 == 0, "multitone: N must be even and positive");
  require(support.size() == coeffs.size(),
          "multitone: support/coeff size mismatch");
  require(support.size() <= static_cast<std::size_t>(sig.N),
          "multitone: K exceeds N");
  for (auto n : support)
    require(n >= -sig.N / 2 && n < sig.N / 2,
            "multitone: harmonic index outside [-N/2, N/2-1]");
  sig.support = std::move(support);
  sig.coeffs = std::move(coeffs);
  return sig;
}

inline cdouble eval_multitone(const MultitoneSignal& sig, double t) {
  if (t < 0.0 || t > sig.T)
    throw std::domain_error("eval_multitone: t outside [0,T]");
  cdouble acc{0.0, 0.0};
  for (std::size_t i = 0; i < sig.support.size(); ++i) {
    const double phase = 2.0 * kPi * static_cast<double>(sig.support[i]) * t / sig.T;
    acc += sig.coeffs[i] * std::polar(1.0, phase);
  }
  return acc;
}

/// K distinct harmonics drawn uniformly, unit-variance complex-normal coeffs.
inline MultitoneSignal gen_random_multitone(double T, double W, std::size_t K,
                                            std::uint64_t seed) {
  const auto N = require_integer(T * W, "gen_random_multitone: N = T*W");
  Rng rng = Rng::keyed(seed, {0x746f6e65ULL});  // "tone"
  std::vector<std::int64_t> support;
  std::vector<cdouble> coeffs;
  for (auto idx : rng.distinct(static_cast<std::size_t>(N), K)) {
    support.push_back(static_cast<std::int64_t>(idx) - N / 2);
    coeffs.push_back(rng.cnormal());
  }
  return make_multitone(T, W, std::move(support), std::move(coeffs));
}

// ---------------------------------------------------------------------------
// Multiband model: bandlimited grid signal, spectrum supported on declared
// rad/s intervals inside [-pi W', pi W').
// ---------------------------------------------------------------------------

struct MultibandSignal {
  double Wp = 0.0;     // W' in Hz; spectrum confined to |omega| < pi*W' rad/s
  double T_obs = 0.0;  // observation length, seconds
  int R = 0;           // grid oversampling factor (rate R*W')
  std::vector<std::pair<double, double>> bands;  // [a_i, b_i) in rad/s
  std::vector<cdouble> grid;                     // samples over [0, T_obs)
  bool nominal_bands = false;  // true after windowing (spectrum is spread)

  double grid_rate() const { return static_cast<double>(R) * Wp; }
  std::size_t n() const { return grid.size(); }
  double occupancy() const {
    double s = 0.0;
    for (auto& [a, b] : bands) s += b - a;
    return s;
  }
};

enum class AmplitudeMode { equal, random };

inline void check_bands(const std::vector<std::pair<double, double>>& bands,
                        double Wp) {
  auto sorted = bands;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto [a, b] = sorted[i];
    require(a < b, "multiband: band must satisfy a < b");
    require(std::abs(a) <= kPi * Wp && std::abs(b) <= kPi * Wp,
            "multiband: band outside [-pi*W', pi*W']");
    if (i > 0)
      require(sorted[i - 1].second <= a, "multiband: bands must be disjoint");
  }
}

/// Builds the grid by synthesizing Fourier-series coefficients on the bins
/// falling inside each declared band (bins at omega_u = 2 pi u / T_obs):
///  - equal mode: flat magnitude, linear phase (pulse centered at T_obs/2);
///  - random mode: complex white noise, per-band amplitude additionally drawn
///    log-uniform over one decade.
/// Either way band i's time-domain energy is amplitude_i^2 * T_obs (exactly),
/// and the spectrum is identically zero outside the declared bands.
inline MultibandSignal gen_multiband(
    const std::vector<std::pair<double, double>>& bands,
    const std::vector<double>& amplitudes, double Wp, double T_obs, int R,
    std::uint64_t seed, AmplitudeMode mode = AmplitudeMode::equal) {
  require(Wp > 0 && T_obs > 0, "gen_multiband: W' and T_obs must be positive");
  require(R >= 2, "gen_multiband: R must be >= 2");
  require(amplitudes.size() == bands.size(),
          "gen_multiband: amplitudes/bands size mismatch");
  check_bands(bands, Wp);

  MultibandSignal sig;
  sig.Wp = Wp;
  sig.T_obs = T_obs;
  sig.R = R;
  sig.bands = bands;

  const auto n = static_cast<std::size_t>(
      require_integer(static_cast<double>(R) * Wp * T_obs, "gen_multiband: R*W'*T_obs"));
  std::vector<cdouble> c(n, cdouble{0.0, 0.0});
  Rng rng = Rng::keyed(seed, {0x62616e64ULL});  // "band"

  const double dw = 2.0 * kPi / T_obs;  // bin spacing in rad/s
  for (std::size_t bi = 0; bi < bands.size(); ++bi) {
    const auto [a, b] = bands[bi];
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = static_cast<double>(signed_bin(k, n)) * dw;
      if (w >= a && w < b) idx.push_back(k);
    }
    if (idx.empty()) continue;
    double amp = amplitudes[bi];
    if (mode == AmplitudeMode::random)
      amp *= std::pow(10.0, rng.uniform(-0.5, 0.5));  // one-decade spread
    if (mode == AmplitudeMode::equal) {
      const double mag = amp / std::sqrt(static_cast<double>(idx.size()));
      for (auto k : idx) {
        const double w = static_cast<double>(signed_bin(k, n)) * dw;
        c[k] = std::polar(mag, -w * T_obs / 2.0);  // center pulse mid-window
      }
    } else {
      std::vector<cdouble> z(idx.size());
      double e = 0.0;
      for (auto& v : z) {
        v = rng.cnormal();
        e += std::norm(v);
      }
      const double scale = e > 0 ? amp / std::sqrt(e) : 0.0;
      for (std::size_t i = 0; i < idx.size(); ++i) c[idx[i]] = scale * z[i];
    }
  }
  sig.grid = fs_synthesis(c);
  return sig;
}

/// z(t) = x(t) * 1_[offset, offset+duration); band metadata becomes nominal.
inline MultibandSignal window_signal(const MultibandSignal& sig, double duration,
                                     double offset) {
  require(duration > 0, "window_signal: duration must be positive");
  require(offset >= 0 && offset + duration <= sig.T_obs + 1e-12,
          "window_signal: window must lie inside [0, T_obs]");
  MultibandSignal out = sig;
  out.nominal_bands = true;
  const double rate = sig.grid_rate();
  for (std::size_t j = 0; j < out.grid.size(); ++j) {
    const double t = static_cast<double>(j) / rate;
    if (t < offset || t >= offset + duration) out.grid[j] = 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Block-sparse (time) model: real signal supported on a union of intervals.
// ---------------------------------------------------------------------------

struct BlockSparseSignal {
  double t0 = 0.0;  // duration, seconds
  std::vector<std::pair<double, double>> intervals;
  double dense_rate = 0.0;
  std::vector<double> grid;  // real samples over [0, t0)
  std::string smoothness;    // generating pulse family descriptor

  std::size_t n() const { return grid.size(); }
  double occupancy() const {
    double s = 0.0;
    for (auto& [a, b] : intervals) s += b - a;
    return s;
  }
};

/// Pulse family for gen_block_sparse: C-infinity bumps
/// b(u) = exp(-1/(1-u^2)) on |u|<1, identically zero outside, so support
/// confinement is exact. Count/width/amplitude drawn per interval. Besides
/// the main bumps, a family may add narrow low-amplitude spikes: they carry
/// little energy but stretch the signal's essential (99.9%) bandwidth far
/// beyond the bulk-energy bandwidth, as is typical of spiky test signals.
struct BumpFamily {
  int min_count = 1, max_count = 3;
  double min_halfwidth = 0.004, max_halfwidth = 0.012;  // seconds
  double min_amp = 0.5, max_amp = 1.0;
  int min_spikes = 0, max_spikes = 0;
  double min_spike_halfwidth = 0.0006, max_spike_halfwidth = 0.0012;
  double min_spike_amp = 0.1, max_spike_amp = 0.25;
};

inline double bump(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

inline BlockSparseSignal gen_block_sparse(
    const std::vector<std::pair<double, double>>& intervals, double t0,
    double dense_rate, const BumpFamily& family, std::uint64_t seed) {
  require(t0 > 0 && dense_rate > 0, "gen_block_sparse: t0, rate must be positive");
  auto sorted = intervals;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto [a, b] = sorted[i];
    require(0.0 <= a && a < b && b <= t0,
            "gen_block_sparse: interval outside [0, t0]");
    if (i > 0)
      require(sorted[i - 1].second <= a,
              "gen_block_sparse: intervals must be disjoint");
  }
  const auto n = static_cast<std::size_t>(
      require_integer(dense_rate * t0, "gen_block_sparse: dense_rate*t0"));

  BlockSparseSignal sig;
  sig.t0 = t0;
  sig.intervals = intervals;
  sig.dense_rate = dense_rate;
  sig.smoothness = "c-inf bump";
  sig.grid.assign(n, 0.0);

  Rng rng = Rng::keyed(seed, {0x62756d70ULL});  // "bump"
  const auto add_bump = [&](double a, double b, double hw_lo, double hw_hi,
                            double amp_lo, double amp_hi) {
    double hw = rng.uniform(hw_lo, hw_hi);
    hw = std::min(hw, (b - a) / 2.0);  // keep the bump inside the interval
    const double center = rng.uniform(a + hw, b - hw);
    const double amp = rng.uniform(amp_lo, amp_hi) * rng.sign();
    const std::size_t j0 = static_cast<std::size_t>(
        std::max(0.0, std::ceil((center - hw) * dense_rate)));
    const std::size_t j1 = std::min(
        n, static_cast<std::size_t>(std::ceil((center + hw) * dense_rate)));
    for (std::size_t j = j0; j < j1; ++j) {
      const double t = static_cast<double>(j) / dense_rate;
      sig.grid[j] += amp * bump((t - center) / hw);
    }
  };
  const auto draw_count = [&](int lo, int hi) {
    return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
  };
  for (const auto& [a, b] : intervals) {
    const int count = draw_count(family.min_count, family.max_count);
    for (int c = 0; c < count; ++c)
      add_bump(a, b, family.min_halfwidth, family.max_halfwidth,
               family.min_amp, family.max_amp);
    const int spikes = draw_count(family.min_spikes, family.max_spikes);
    for (int c = 0; c < spikes; ++c)
      add_bump(a, b, family.min_spike_halfwidth, family.max_spike_halfwidth,
               family.min_spike_amp, family.max_spike_amp);
  }
  return sig;
}

}  // namespace subnyq
