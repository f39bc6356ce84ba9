// The three acquisition chains: Random Demodulator (multiply, integrate,
// dump), Modulated Wideband Converter (multiply, low-pass, decimate, per
// channel) and the block-sparse sampler (block-correlate, sample).
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "subnyq/common.hpp"
#include "subnyq/fft.hpp"
#include "subnyq/rng.hpp"
#include "subnyq/signals.hpp"

namespace subnyq {

// ---------------------------------------------------------------------------
// Configs
// ---------------------------------------------------------------------------

struct RdConfig {
  double T = 0.0;          // window, seconds
  double W = 0.0;          // chip / Nyquist rate, Hz
  std::int64_t M = 0;      // output samples per window
  ChippingSequence chips;  // length N = T*W at rate W, non-periodic

  std::int64_t N() const { return require_integer(T * W, "RdConfig: N = T*W"); }
};

inline RdConfig make_rd_config(double T, double W, std::int64_t M,
                               std::uint64_t seed) {
  RdConfig cfg;
  cfg.T = T;
  cfg.W = W;
  cfg.M = M;
  cfg.chips = gen_chipping(seed, static_cast<std::size_t>(cfg.N()), W, false);
  return cfg;
}

/// How the MWC low-pass treats the window boundary. `periodic` is exact for
/// the T-periodic grid models used throughout; `zero_pad` mimics a transient
/// acquisition (edge samples are then only approximate).
enum class BoundaryMode { periodic, zero_pad };

struct MwcConfig {
  double Wp = 0.0;       // W', Hz
  std::int64_t Lp = 0;   // L', chips per period (T_p = L'/W')
  double Mp = 0.0;       // M', sub-sampling factor (T_s = M'/W'); real so the
                         // single-channel substitution M' -> M'/q' stays exact
  std::int64_t qp = 0;   // q', channels
  std::vector<ChippingSequence> chips;  // q' periodic sequences, length L'
  BoundaryMode boundary = BoundaryMode::periodic;

  double T_p() const { return static_cast<double>(Lp) / Wp; }
  double T_s() const { return Mp / Wp; }
};

inline MwcConfig make_mwc_config(double Wp, std::int64_t Lp, double Mp,
                                 std::int64_t qp, std::uint64_t seed,
                                 BoundaryMode boundary = BoundaryMode::periodic) {
  MwcConfig cfg;
  cfg.Wp = Wp;
  cfg.Lp = Lp;
  cfg.Mp = Mp;
  cfg.qp = qp;
  cfg.boundary = boundary;
  cfg.chips.reserve(static_cast<std::size_t>(qp));
  for (std::int64_t i = 0; i < qp; ++i) {
    const auto chan_seed = Rng::keyed(seed, {0x6d7763ULL, std::uint64_t(i)}).next_u64();
    cfg.chips.push_back(
        gen_chipping(chan_seed, static_cast<std::size_t>(Lp), Wp, true));
  }
  return cfg;
}

struct BlockSamplerConfig {
  double T = 0.0;      // window, seconds
  std::int64_t L = 0;  // segments
  std::int64_t M = 0;  // samples per channel (D = M)
  std::int64_t q = 0;  // channels
  std::vector<ChippingSequence> chips;  // q sequences of length L at rate L/T

  double sample_rate() const { return double(L * M) / T; }
};

inline BlockSamplerConfig make_block_config(double T, std::int64_t L,
                                            std::int64_t M, std::int64_t q,
                                            std::uint64_t seed) {
  BlockSamplerConfig cfg;
  cfg.T = T;
  cfg.L = L;
  cfg.M = M;
  cfg.q = q;
  cfg.chips.reserve(static_cast<std::size_t>(q));
  for (std::int64_t i = 0; i < q; ++i) {
    const auto chan_seed = Rng::keyed(seed, {0x626c6bULL, std::uint64_t(i)}).next_u64();
    cfg.chips.push_back(
        gen_chipping(chan_seed, static_cast<std::size_t>(L), double(L) / T, false));
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Random Demodulator
// ---------------------------------------------------------------------------

/// alpha(n) = integral of exp(j 2 pi n t / T) over one chip [0, 1/W):
/// T*(exp(j 2 pi n / N) - 1)/(j 2 pi n), alpha(0) = 1/W.
inline cdouble rd_alpha(std::int64_t n, double T, std::int64_t N) {
  if (n == 0) return {T / double(N), 0.0};
  const double th = 2.0 * kPi * double(n) / double(N);
  return T * (std::polar(1.0, th) - 1.0) / (kJ * (2.0 * kPi * double(n)));
}

/// Closed-form integrate-and-dump output for a multitone input:
/// y(k) = sum_n alpha(n) X(n) sum_{l in block k} p_l exp(j 2 pi n l / N).
inline CVec rd_sample_analytic(const MultitoneSignal& sig, const RdConfig& cfg) {
  require(sig.T == cfg.T && sig.W == cfg.W,
          "rd_sample_analytic: signal/config mismatch");
  const std::int64_t N = cfg.N(), M = cfg.M;
  require(M >= 1, "rd_sample_analytic: M must be >= 1");
  require(N % M == 0, "rd_sample_analytic: N mod M must be 0");
  require(cfg.chips.size() == static_cast<std::size_t>(N) && !cfg.chips.periodic,
          "rd_sample_analytic: chips must be non-periodic length N");
  const std::int64_t cps = N / M;  // chips per sample
  CVec y = CVec::Zero(M);
  for (std::size_t i = 0; i < sig.support.size(); ++i) {
    const std::int64_t n = sig.support[i];
    const cdouble w = rd_alpha(n, cfg.T, N) * sig.coeffs[i];
    for (std::int64_t k = 0; k < M; ++k) {
      cdouble acc{0.0, 0.0};
      for (std::int64_t l = k * cps; l < (k + 1) * cps; ++l)
        acc += double(cfg.chips.at(l)) *
               std::polar(1.0, 2.0 * kPi * double(n) * double(l) / double(N));
      y(k) += w * acc;
    }
  }
  return y;
}

/// Quadrature integrate-and-dump on a dense grid covering [0,T] inclusive at
/// rate R*W (R*N+1 points). Composite Simpson per chip: the piecewise-constant
/// p(t) introduces no discontinuity error because chip edges are grid points,
/// and Simpson's O(R^-4) keeps the R=32 grid inside 1e-4 of the closed form.
inline CVec rd_sample_grid(std::span<const cdouble> x_grid, const RdConfig& cfg,
                           int R) {
  require(R >= 2, "rd_sample_grid: R must be >= 2");
  require(R % 2 == 0, "rd_sample_grid: R must be even (Simpson rule)");
  const std::int64_t N = cfg.N(), M = cfg.M;
  require(M >= 1 && N % M == 0, "rd_sample_grid: N mod M must be 0");
  require(x_grid.size() == static_cast<std::size_t>(N) * R + 1,
          "rd_sample_grid: grid must cover [0,T] at rate R*W (R*N+1 samples)");
  require(cfg.chips.size() == static_cast<std::size_t>(N),
          "rd_sample_grid: chips must have length N");

  const double dt = cfg.T / (double(N) * double(R));
  const std::int64_t cps = N / M;
  CVec y = CVec::Zero(M);
  for (std::int64_t l = 0; l < N; ++l) {
    const std::size_t base = static_cast<std::size_t>(l) * R;
    cdouble acc = x_grid[base] + x_grid[base + R];
    for (int j = 1; j < R; ++j)
      acc += (j % 2 ? 4.0 : 2.0) * x_grid[base + j];
    y(l / cps) += double(cfg.chips.at(l)) * acc * (dt / 3.0);
  }
  return y;
}

/// Dense evaluation grid for a multitone input (R*N+1 points over [0,T]).
inline std::vector<cdouble> rd_dense_grid(const MultitoneSignal& sig, int R) {
  const auto N = require_integer(sig.T * sig.W, "rd_dense_grid: N = T*W");
  const std::size_t n = static_cast<std::size_t>(N) * R + 1;
  std::vector<cdouble> g(n);
  for (std::size_t j = 0; j < n; ++j)
    g[j] = eval_multitone(sig, sig.T * double(j) / double(n - 1));
  return g;
}

/// Dense grid for a multiband input: the signal's own grid plus the periodic
/// wrap sample at t = T_obs.
inline std::vector<cdouble> rd_dense_grid(const MultibandSignal& sig) {
  std::vector<cdouble> g(sig.grid.begin(), sig.grid.end());
  g.push_back(sig.grid.empty() ? cdouble{0, 0} : sig.grid.front());
  return g;
}

// ---------------------------------------------------------------------------
// Modulated Wideband Converter
// ---------------------------------------------------------------------------

/// Appendix-B per-chip factor of the chip waveform's Fourier series:
/// rho(m) = (1 - exp(-j 2 pi m / L')) / (j 2 pi m), rho(0) = 1/L'.
inline cdouble mwc_rho(std::int64_t m, std::int64_t Lp) {
  if (m == 0) return {1.0 / double(Lp), 0.0};
  return (1.0 - std::polar(1.0, -2.0 * kPi * double(m) / double(Lp))) /
         (kJ * 2.0 * kPi * double(m));
}

/// Fourier-series coefficient P_i(m) of one channel's T_p-periodic chip
/// waveform: rho(m) * sum_l p_il exp(-j 2 pi m l / L').
inline cdouble mwc_chip_coeff(const ChippingSequence& ch, std::int64_t m,
                              std::int64_t Lp) {
  cdouble s{0.0, 0.0};
  for (std::int64_t l = 0; l < Lp; ++l)
    s += double(ch.at(l)) *
         std::polar(1.0, -2.0 * kPi * double(m) * double(l) / double(Lp));
  return mwc_rho(m, Lp) * s;
}

namespace detail {
/// FFT-mask ideal low-pass: keep signed bin u with -bound <= u < bound.
inline void lowpass_mask(std::vector<cdouble>& spectrum, double bound) {
  const std::size_t n = spectrum.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double u = double(signed_bin(k, n));
    if (!(u >= -bound - 1e-9 && u < bound - 1e-9)) spectrum[k] = {0.0, 0.0};
  }
}
}  // namespace detail

/// Simulates all q' channels: multiply by the periodic chip waveform, ideal
/// low-pass with cut-off pi*W'/L' rad/s (one spectral slice), decimate to
/// rate W'/M'. Input grid covers [0, T_obs) at rate R*W'. Returns q' x V,
/// V = T_obs*W'/M'.
///
/// periodic mode evaluates the chain exactly in the frequency domain: the
/// grid signal is a trigonometric polynomial and the chip staircase has the
/// closed-form series P_i(m), so the low-passed product's coefficients are a
/// finite convolution. (Pointwise staircase mixing on the grid would bias the
/// chip harmonics by a phase ~pi*m/(R*L') — first order in 1/R — needing
/// R in the thousands to reach the 1e-3 identity tolerance.)
/// zero_pad mode is the literal transient pipeline: pointwise mixing, FFT
/// mask on a 4x zero-padded grid, decimation; its edge samples and chip
/// harmonics are approximate by design.
inline CMat mwc_sample(std::span<const cdouble> x_grid, const MwcConfig& cfg,
                       int R) {
  require(R >= 1, "mwc_sample: R must be >= 1");
  require(cfg.Lp >= 1 && cfg.qp >= 1 && cfg.Mp > 0, "mwc_sample: bad config");
  require(cfg.chips.size() == static_cast<std::size_t>(cfg.qp),
          "mwc_sample: need q' chip sequences");
  const std::size_t n = x_grid.size();
  require(n > 0, "mwc_sample: empty grid");
  const auto stride = require_integer(double(R) * cfg.Mp,
                                      "mwc_sample: decimation ratio R*M'");
  require(stride >= 1 && n % static_cast<std::size_t>(stride) == 0,
          "mwc_sample: grid length must be a multiple of the decimation ratio");
  const std::size_t V = n / static_cast<std::size_t>(stride);

  // Half-open keep set [-bound, bound) in signed dense bins; bound matches
  // pi*W'/L' rad/s on a grid of n points at rate R*W'.
  const double bound = double(n) / (2.0 * double(R) * double(cfg.Lp));

  CMat Y(cfg.qp, V);
  if (cfg.boundary == BoundaryMode::periodic) {
    require(n % (static_cast<std::size_t>(R) * cfg.Lp) == 0,
            "mwc_sample: periodic boundary needs T_obs to be a multiple of T_p");
    const std::int64_t bps = std::int64_t(n) / (std::int64_t(R) * cfg.Lp);
    const std::int64_t hi = (std::int64_t(n) - 1) / 2;  // signed-bin range
    const std::int64_t lo = hi - std::int64_t(n) + 1;
    require(std::int64_t(V) >= bps,
            "mwc_sample: output rate below one slice per period");
    auto c = fs_coeffs(x_grid);
    for (std::int64_t i = 0; i < cfg.qp; ++i) {
      const auto& ch = cfg.chips[static_cast<std::size_t>(i)];
      require(ch.size() == static_cast<std::size_t>(cfg.Lp) && ch.periodic,
              "mwc_sample: chips must be periodic length L'");
      // P_i(m) = rho(m) * F[m mod L']; F is the L'-point chip DFT.
      std::vector<cdouble> F(static_cast<std::size_t>(cfg.Lp));
      for (std::int64_t r = 0; r < cfg.Lp; ++r) {
        cdouble s{0, 0};
        for (std::int64_t l = 0; l < cfg.Lp; ++l)
          s += double(ch.at(l)) *
               std::polar(1.0, -2.0 * kPi * double(r) * double(l) / double(cfg.Lp));
        F[static_cast<std::size_t>(r)] = s;
      }
      std::vector<cdouble> out(V, cdouble{0, 0});
      for (std::int64_t u = std::int64_t(std::ceil(-bound - 1e-9));
           double(u) < bound - 1e-9; ++u) {
        cdouble d{0, 0};
        for (std::int64_t m = (u - hi) / bps - 1; m * bps + lo <= u; ++m) {
          const std::int64_t b = u - m * bps;
          if (b < lo || b > hi) continue;
          const std::int64_t r = ((m % cfg.Lp) + cfg.Lp) % cfg.Lp;
          d += mwc_rho(m, cfg.Lp) * F[static_cast<std::size_t>(r)] *
               c[bin_index(b, n)];
        }
        out[bin_index(u, V)] = d;
      }
      auto yi = fs_synthesis(out);
      for (std::size_t k = 0; k < V; ++k) Y(i, std::int64_t(k)) = yi[k];
    }
    return Y;
  }

  for (std::int64_t i = 0; i < cfg.qp; ++i) {
    const auto& ch = cfg.chips[static_cast<std::size_t>(i)];
    require(ch.size() == static_cast<std::size_t>(cfg.Lp) && ch.periodic,
            "mwc_sample: chips must be periodic length L'");
    // Pointwise staircase mixing, then a >= 4x zero-padded FFT mask to bound
    // the circular wrap of the sinc tail.
    std::vector<cdouble> padded(4 * n, cdouble{0, 0});
    for (std::size_t j = 0; j < n; ++j)
      padded[n + j] = x_grid[j] * double(ch.at(std::int64_t(j / std::size_t(R))));
    auto spec = fft(padded);
    detail::lowpass_mask(spec, 4.0 * bound);
    auto full = ifft(spec);
    for (std::size_t k = 0; k < V; ++k)
      Y(i, static_cast<std::int64_t>(k)) = full[n + k * std::size_t(stride)];
  }
  return Y;
}

/// Grid-fidelity DSP variant of the channel chain: pointwise staircase mixing
/// on the dense grid, *circular* FFT low-pass, decimation — the literal
/// digital simulation of the front end on a rate-R*W' grid. Because the chip
/// staircase is only sampled (not integrated) per grid cell, chip harmonic m
/// carries a deterministic bias factor
///   b(m) = exp(j*pi*m/(R*L')) * (pi*m/(R*L')) / sin(pi*m/(R*L')),
/// i.e. |b(m)-1| ~ pi*|m|/(R*L') to first order, so the output equals the
/// exact chain with each spectral slice scaled by b(m): a simulation floor
/// that the experiment layer exposes as a declared fidelity knob and that
/// vanishes as R grows. Boundary handling is circular by construction; the
/// config's boundary mode is ignored.
inline CMat mwc_sample_grid(std::span<const cdouble> x_grid,
                            const MwcConfig& cfg, int R) {
  require(R >= 1, "mwc_sample_grid: R must be >= 1");
  require(cfg.Lp >= 1 && cfg.qp >= 1 && cfg.Mp > 0,
          "mwc_sample_grid: bad config");
  require(cfg.chips.size() == static_cast<std::size_t>(cfg.qp),
          "mwc_sample_grid: need q' chip sequences");
  const std::size_t n = x_grid.size();
  require(n > 0, "mwc_sample_grid: empty grid");
  const auto stride = require_integer(double(R) * cfg.Mp,
                                      "mwc_sample_grid: decimation ratio R*M'");
  require(stride >= 1 && n % static_cast<std::size_t>(stride) == 0,
          "mwc_sample_grid: grid length must be a multiple of the decimation "
          "ratio");
  require(n % (static_cast<std::size_t>(R) * cfg.Lp) == 0,
          "mwc_sample_grid: grid must cover whole chip periods");
  const std::size_t V = n / static_cast<std::size_t>(stride);
  const double bound = double(n) / (2.0 * double(R) * double(cfg.Lp));

  CMat Y(cfg.qp, Eigen::Index(V));
  std::vector<cdouble> prod(n);
  for (std::int64_t i = 0; i < cfg.qp; ++i) {
    const auto& ch = cfg.chips[static_cast<std::size_t>(i)];
    require(ch.size() == static_cast<std::size_t>(cfg.Lp) && ch.periodic,
            "mwc_sample_grid: chips must be periodic length L'");
    for (std::size_t j = 0; j < n; ++j)
      prod[j] = x_grid[j] * double(ch.at(std::int64_t(j / std::size_t(R))));
    auto spec = fft(prod);
    detail::lowpass_mask(spec, bound);
    auto low = ifft(spec);
    for (std::size_t k = 0; k < V; ++k)
      Y(i, std::int64_t(k)) = low[k * std::size_t(stride)];
  }
  return Y;
}

/// The chip-harmonic bias of mwc_sample_grid at harmonic m (== 1 at m = 0).
inline cdouble mwc_grid_bias(std::int64_t m, std::int64_t Lp, int R) {
  if (m == 0) return {1.0, 0.0};
  const double half = kPi * double(m) / (double(R) * double(Lp));
  return std::polar(half / std::sin(half), half);
}

/// Single-channel collapse: substitute M' -> M'/q', L' -> L'q' (chip patterns
/// concatenated in channel order), q' -> 1. Output rate q'W'/M'.
inline CVec mwc_single_channel_sample(std::span<const cdouble> x_grid,
                                      const MwcConfig& cfg, int R) {
  MwcConfig sub;
  sub.Wp = cfg.Wp;
  sub.Lp = cfg.Lp * cfg.qp;
  sub.Mp = cfg.Mp / double(cfg.qp);
  sub.qp = 1;
  sub.boundary = cfg.boundary;
  ChippingSequence seq;
  seq.chip_rate = cfg.Wp;
  seq.periodic = true;
  seq.seed = cfg.chips.empty() ? 0 : cfg.chips.front().seed;
  for (const auto& ch : cfg.chips)
    seq.values.insert(seq.values.end(), ch.values.begin(), ch.values.end());
  sub.chips.push_back(std::move(seq));
  CMat Y = mwc_sample(x_grid, sub, R);
  return Y.row(0).transpose();
}

// ---------------------------------------------------------------------------
// Block-sparse sampler
// ---------------------------------------------------------------------------

/// y_i(k) = sum_{l=0}^{L-1} p_i(l) * x(l T/L + k T/(L M)), k = 0..M-1:
/// channel i correlates the chip pattern against the L segment contents.
/// (Equivalently: convolve with the time-reversed chip impulse train and
/// sample the final segment window at rate LM/T.)
inline CMat block_sample(const BlockSparseSignal& x, const BlockSamplerConfig& cfg) {
  require(x.t0 == cfg.T, "block_sample: signal/config window mismatch");
  require(cfg.L >= 1 && cfg.M >= 1 && cfg.q >= 1, "block_sample: bad config");
  require(cfg.chips.size() == static_cast<std::size_t>(cfg.q),
          "block_sample: need q chip sequences");
  const std::size_t n = x.n();
  const auto stride = require_integer(
      x.dense_rate * cfg.T / (double(cfg.L) * double(cfg.M)),
      "block_sample: dense rate over sample rate");
  require(stride >= 1, "block_sample: dense grid coarser than the sample rate");
  require(n == static_cast<std::size_t>(stride) * std::size_t(cfg.L) * std::size_t(cfg.M),
          "block_sample: grid length must equal dense_rate * T");
  const std::size_t seg = n / std::size_t(cfg.L);  // samples per segment

  CMat Y(cfg.q, cfg.M);
  for (std::int64_t i = 0; i < cfg.q; ++i) {
    const auto& ch = cfg.chips[static_cast<std::size_t>(i)];
    require(ch.size() == static_cast<std::size_t>(cfg.L),
            "block_sample: chips must have length L");
    for (std::int64_t k = 0; k < cfg.M; ++k) {
      double acc = 0.0;
      for (std::int64_t l = 0; l < cfg.L; ++l)
        acc += double(ch.at(l)) *
               x.grid[std::size_t(l) * seg + std::size_t(k) * std::size_t(stride)];
      Y(i, k) = cdouble{acc, 0.0};
    }
  }
  return Y;
}

}  // namespace subnyq
