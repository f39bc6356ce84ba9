// Sparse recovery: OMP / S-OMP greedy solvers, the continuous-to-finite
// support reduction, and re-synthesis back to signal grids.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "subnyq/common.hpp"
#include "subnyq/fft.hpp"
#include "subnyq/linear_systems.hpp"
#include "subnyq/samplers.hpp"
#include "subnyq/signals.hpp"

namespace subnyq {

struct RecoveryResult {
  std::vector<std::int64_t> support;  // in selection order
  CMat coeffs;                        // |support| x V, rows follow `support`
  double residual_norm = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
};

enum class SompAggregate { l1, l2 };

namespace detail {

// Singular values below kSvTruncation * sigma_max are treated as zero in all
// least-squares refits.
inline constexpr double kSvTruncation = 1e-10;

inline CMat lsq_solve(const CMat& A, const CMat& B) {
  Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kSvTruncation);
  return svd.solve(B);
}

}  // namespace detail

/// Simultaneous OMP: greedy row selection by aggregated normalized
/// correlations (l1 across measurement columns by default, the cited S-OMP's
/// choice; l2 behind the flag), joint least-squares refit each iteration.
/// Ties break to the lowest column index. Stops after K selections or when
/// the residual Frobenius norm drops to tol (with a 1e-12 relative floor).
inline RecoveryResult somp(const CMat& A, const CMat& Y, std::int64_t K,
                           double tol = 0.0,
                           SompAggregate agg = SompAggregate::l1) {
  require(A.rows() == Y.rows(), "somp: A and Y row counts differ");
  require(K >= 0, "somp: K must be nonnegative");
  require(K <= A.rows(), "somp: K exceeds the number of measurements");
  const std::int64_t L = A.cols();

  Eigen::VectorXd colnorm(L);
  for (std::int64_t l = 0; l < L; ++l) colnorm(l) = A.col(l).norm();

  RecoveryResult res;
  const double scale = Y.norm();
  const double eff_tol = std::max(tol, 1e-12 * scale);
  CMat R = Y;
  std::vector<bool> picked(static_cast<std::size_t>(L), false);

  for (std::int64_t it = 0; it < K; ++it) {
    if (R.norm() <= eff_tol) break;
    CMat corr = A.adjoint() * R;  // L x V
    std::int64_t best = -1;
    double bestval = -1.0;
    for (std::int64_t l = 0; l < L; ++l) {
      if (picked[static_cast<std::size_t>(l)] || colnorm(l) == 0.0) continue;
      double val = (agg == SompAggregate::l1)
                       ? corr.row(l).cwiseAbs().sum()
                       : corr.row(l).norm();
      val /= colnorm(l);
      if (val > bestval) {  // strict: lowest index wins exact ties
        bestval = val;
        best = l;
      }
    }
    if (best < 0) break;
    picked[static_cast<std::size_t>(best)] = true;
    res.support.push_back(best);
    res.iterations = it + 1;

    CMat As(A.rows(), std::ssize(res.support));
    for (std::size_t j = 0; j < res.support.size(); ++j)
      As.col(std::int64_t(j)) = A.col(res.support[j]);
    res.coeffs = detail::lsq_solve(As, Y);
    R = Y - As * res.coeffs;
  }
  if (res.support.empty()) res.coeffs = CMat::Zero(0, Y.cols());
  res.residual_norm = R.norm();
  res.converged = res.residual_norm <= eff_tol;
  return res;
}

/// Single-measurement OMP: S-OMP with one measurement column.
inline RecoveryResult omp(const CMat& A, const CVec& y, std::int64_t K,
                          double tol = 0.0) {
  return somp(A, y, K, tol);
}

/// Continuous-to-finite block: build an orthonormal basis G of the
/// measurement column space from a rank-revealing factorization of Y Y^H,
/// recover the joint support with somp on (A, G), then solve the full Y by
/// least squares on the support columns.
inline RecoveryResult support_then_lsq(const CMat& A, const CMat& Y,
                                       std::int64_t K) {
  require(A.rows() == Y.rows(), "support_then_lsq: A and Y row counts differ");
  require(K >= 0 && K <= A.rows(),
          "support_then_lsq: K exceeds the number of measurements");
  const std::int64_t q = Y.rows();

  CMat H = Y * Y.adjoint();
  Eigen::SelfAdjointEigenSolver<CMat> eig(H);
  const auto& lam = eig.eigenvalues();  // ascending
  const double lmax = lam(q - 1);
  RecoveryResult res;
  res.converged = true;
  if (!(lmax > 0.0)) {  // rank-0 measurements
    res.coeffs = CMat::Zero(0, Y.cols());
    res.residual_norm = Y.norm();
    return res;
  }
  // Numerical-rank cut on the Gram spectrum. The eigensolver's noise floor
  // for exact-zero eigenvalues is ~1e-16 * lmax, so the cut must sit above
  // it or pure-noise directions enter the frame.
  const double cut = 1e-12 * lmax;
  std::int64_t rank = 0;
  for (std::int64_t i = 0; i < q; ++i)
    if (lam(i) > cut) ++rank;
  CMat G(q, rank);
  for (std::int64_t i = 0; i < rank; ++i)
    G.col(i) = eig.eigenvectors().col(q - 1 - i);

  auto step1 = somp(A, G, K, 0.0);
  res.support = step1.support;
  res.iterations = step1.iterations;
  if (res.support.empty()) {
    res.coeffs = CMat::Zero(0, Y.cols());
    res.residual_norm = Y.norm();
    return res;
  }
  CMat As(A.rows(), std::ssize(res.support));
  for (std::size_t j = 0; j < res.support.size(); ++j)
    As.col(std::int64_t(j)) = A.col(res.support[j]);
  res.coeffs = detail::lsq_solve(As, Y);
  res.residual_norm = (Y - As * res.coeffs).norm();
  return res;
}

/// Scatter the result's coefficient rows into a dense L-row matrix
/// (zero rows off support).
inline CMat scatter_rows(const RecoveryResult& result, std::int64_t L) {
  const std::int64_t V = result.coeffs.cols();
  CMat full = CMat::Zero(L, V);
  for (std::size_t j = 0; j < result.support.size(); ++j) {
    require(result.support[j] >= 0 && result.support[j] < L,
            "scatter_rows: support index out of range");
    full.row(result.support[j]) = result.coeffs.row(std::int64_t(j));
  }
  return full;
}

// ---------------------------------------------------------------------------
// Re-synthesis
// ---------------------------------------------------------------------------

/// RD multitone reconstruction: X(n_r) = solved value / alpha(n_r) on the
/// support, zero elsewhere; evaluated by the multitone evaluator at `times`.
inline std::vector<cdouble> unweight_and_synthesize_multitone(
    const RecoveryResult& result, const CVec& weights, const RdConfig& cfg,
    const std::vector<double>& times) {
  const std::int64_t N = cfg.N();
  require(weights.size() == N,
          "unweight_and_synthesize_multitone: need one weight per column");
  std::vector<std::int64_t> support;
  std::vector<cdouble> coeffs;
  for (std::size_t j = 0; j < result.support.size(); ++j) {
    const std::int64_t r = result.support[j];
    require(r >= 0 && r < N,
            "unweight_and_synthesize_multitone: column out of range");
    const cdouble w = weights(r);
    require(std::abs(w) > 0.0,
            "unweight_and_synthesize_multitone: zero weight");  // never occurs
    support.push_back(-N / 2 + r);
    coeffs.push_back(result.coeffs(std::int64_t(j), 0) / w);
  }
  auto sig = make_multitone(cfg.T, cfg.W, support, coeffs);
  std::vector<cdouble> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    out[i] = eval_multitone(sig, times[i]);
  return out;
}

/// MWC multiband reconstruction on a dense periodic grid of `n_dense` points
/// over [0, T_obs). Each recovered row r is unweighted by the chip-harmonic
/// factor rho(m_r) (= beta(m_r) * M'/W' — the rate prefactor is the paper's
/// DTFT bookkeeping and is not present in the time-domain sample rows), its
/// baseband spectrum is placed back at the slice position -m_r * omega_p,
/// and the slices are summed.
inline std::vector<cdouble> synthesize_multiband(const RecoveryResult& result,
                                                 const MwcConfig& cfg,
                                                 double T_obs,
                                                 std::size_t n_dense) {
  require(n_dense >= 1, "synthesize_multiband: empty output grid");
  const std::int64_t V = result.coeffs.cols();
  const std::int64_t bps =
      require_integer(T_obs * cfg.Wp / double(cfg.Lp),
                      "synthesize_multiband: T_obs * W'/L'");  // bins/slice
  std::vector<cdouble> chat(n_dense, cdouble{0, 0});
  const double bound = double(bps) / 2.0;
  const auto u_lo = static_cast<std::int64_t>(std::ceil(-bound - 1e-9));

  for (std::size_t j = 0; j < result.support.size(); ++j) {
    const std::int64_t r = result.support[j];
    require(r >= 0 && r < cfg.Lp, "synthesize_multiband: row out of range");
    const std::int64_t m = mwc_shift_index(r, cfg.Lp);
    const cdouble rho = mwc_rho(m, cfg.Lp);
    std::vector<cdouble> row(static_cast<std::size_t>(V));
    for (std::int64_t v = 0; v < V; ++v)
      row[static_cast<std::size_t>(v)] = result.coeffs(std::int64_t(j), v);
    auto gam = fs_coeffs(row);
    for (std::int64_t u = u_lo; double(u) < bound - 1e-9; ++u) {
      const std::int64_t dense = u - m * bps;
      require(std::llabs(dense) <= std::int64_t(n_dense) / 2,
              "synthesize_multiband: output grid too coarse for slice shift");
      chat[bin_index(dense, n_dense)] +=
          gam[bin_index(u, static_cast<std::size_t>(V))] / rho;
    }
  }
  return fs_synthesis(chat);
}

/// Block reconstruction: per segment l, sum_n A_hat(l, n) psi_n(tau) on
/// [0, T/L), segments concatenated; evaluated on a dense grid of n points at
/// rate n/T. The sampled signals are real, so the real part is returned.
inline std::vector<double> synthesize_block(const CMat& Ahat,
                                            const BlockSamplerConfig& cfg,
                                            const BasisFn& basis,
                                            std::size_t n) {
  require(Ahat.rows() == cfg.L && Ahat.cols() == cfg.M,
          "synthesize_block: A-hat must be L x M for this config");
  require(n >= 1, "synthesize_block: empty output grid");
  const double rate = double(n) / cfg.T;
  const double seg = cfg.T / double(cfg.L);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = double(i) / rate;
    const auto l = std::min<std::int64_t>(
        cfg.L - 1, static_cast<std::int64_t>(std::floor(t / seg)));
    if (Ahat.row(l).isZero(0.0)) continue;
    const double tau = t - double(l) * seg;
    cdouble acc{0, 0};
    for (std::int64_t nn = 0; nn < cfg.M; ++nn)
      acc += Ahat(l, nn) * basis(nn, tau);
    out[i] = acc.real();
  }
  return out;
}

inline std::vector<double> synthesize_block(const CMat& Ahat,
                                            const BlockSamplerConfig& cfg,
                                            std::size_t n) {
  return synthesize_block(Ahat, cfg,
                          fourier_block_basis(cfg.T, cfg.L, cfg.M), n);
}

}  // namespace subnyq
