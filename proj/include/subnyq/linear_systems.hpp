// Exact underdetermined linear systems for the four sampler/model pairings:
//   RD on multitone        y = A (alpha . X)          (SMV)
//   MWC on multiband       Y = A S                    (MMV, beta-scaled rows)
//   MWC on multitone       Y = A S                    (MMV, eta-scaled rows)
//   RD on multiband        y ~ A (w . X(omega_i))     (SMV, midpoint Riemann)
// plus the block-sparse sampler's  Y Psi^{-1} = Phi A_coef.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "subnyq/common.hpp"
#include "subnyq/fft.hpp"
#include "subnyq/samplers.hpp"
#include "subnyq/signals.hpp"

namespace subnyq {

struct SmvSystem {
  CMat A;                         // measurements x unknowns
  CVec y;                         // measurement vector (may be empty)
  CVec weights;                   // per-unknown scale (alpha(n) or w_i)
  std::vector<double> index_map;  // column -> harmonic index n_r or omega_i
};

struct MmvSystem {
  CMat A;                               // q x L'
  CMat Y;                               // q x V
  CVec weights;                         // per-row scale beta(m_r) or eta(m_r)
  std::vector<std::int64_t> index_map;  // row r -> shift index m_r
};

struct BlockSystem {
  Eigen::MatrixXd Phi;  // q x L, +/-1 chip matrix
  CMat Psi;             // D x M basis evaluations psi_n(k T/(L M))
  CMat Y;               // q x M samples
  CMat rhs;             // Y * Psi^{-1}, equals Phi * A_coef
  double cond = 0.0;    // condition number of Psi
};

// ---------------------------------------------------------------------------
// RD on multitone (Appendix A matrix form)
// ---------------------------------------------------------------------------

/// A = Sigma * Psi: row k sums chips over block k against the tone kernel,
/// A_{k,r} = sum_{l in block k} p_l exp(+j 2 pi n_r l / N), n_r = -N/2 + r.
/// Solvers operate on the weighted unknowns alpha(n_r) * X(n_r).
inline SmvSystem build_rd_smv(const RdConfig& cfg) {
  const std::int64_t N = cfg.N(), M = cfg.M;
  require(M >= 1, "build_rd_smv: M must be >= 1");
  require(N % M == 0, "build_rd_smv: N mod M must be 0");
  require(N % 2 == 0, "build_rd_smv: N must be even");
  require(cfg.chips.size() == static_cast<std::size_t>(N),
          "build_rd_smv: chips must have length N");
  const std::int64_t cps = N / M;
  SmvSystem sys;
  sys.A.resize(M, N);
  sys.weights.resize(N);
  sys.index_map.resize(static_cast<std::size_t>(N));
  for (std::int64_t r = 0; r < N; ++r) {
    const std::int64_t n = -N / 2 + r;
    sys.weights(r) = rd_alpha(n, cfg.T, N);
    sys.index_map[static_cast<std::size_t>(r)] = double(n);
    for (std::int64_t k = 0; k < M; ++k) {
      cdouble acc{0, 0};
      for (std::int64_t l = k * cps; l < (k + 1) * cps; ++l)
        acc += double(cfg.chips.at(l)) *
               std::polar(1.0, 2.0 * kPi * double(n) * double(l) / double(N));
      sys.A(k, r) = acc;
    }
  }
  return sys;
}

// ---------------------------------------------------------------------------
// MWC shift-index map and row weights
// ---------------------------------------------------------------------------

/// Row r of the MWC MMV carries shift index m_r = -floor((L'+1)/2) + 1 + r,
/// e.g. L' = 50 -> m_r in [-24, 25].
inline std::int64_t mwc_shift_index(std::int64_t r, std::int64_t Lp) {
  return -((Lp + 1) / 2) + 1 + r;
}

/// beta(m) = (W'/M') * rho(m); beta(0) = W'/(M' L') (the m -> 0 limit of the
/// closed form — the rate prefactor applies at m = 0 too).
inline cdouble mwc_beta(std::int64_t m, const MwcConfig& cfg) {
  return (cfg.Wp / cfg.Mp) * mwc_rho(m, cfg.Lp);
}

/// eta(m) = rho(m) for the multitone specialization: with the 1/N-normalized
/// channel DFT the tone coefficients enter the rows scaled by the chip
/// harmonic weight alone; eta(0) = 1/L'.
inline cdouble mwc_eta(std::int64_t m, std::int64_t Lp) {
  return mwc_rho(m, Lp);
}

/// A_{i,r} = sum_l p_il exp(-j 2 pi l m_r / L') (i.e. Phi * Psi with
/// Psi_{l,r} = exp(-j 2 pi l m_r / L')); the rho(m_r) factor lives in the
/// row weights so that P_i(m_r) = rho(m_r) * A_{i,r}.
inline CMat build_mwc_sensing_matrix(const MwcConfig& cfg) {
  CMat A(cfg.qp, cfg.Lp);
  for (std::int64_t i = 0; i < cfg.qp; ++i) {
    const auto& ch = cfg.chips[static_cast<std::size_t>(i)];
    require(ch.size() == static_cast<std::size_t>(cfg.Lp),
            "mwc sensing matrix: chips must have length L'");
    for (std::int64_t r = 0; r < cfg.Lp; ++r) {
      const std::int64_t m = mwc_shift_index(r, cfg.Lp);
      cdouble acc{0, 0};
      for (std::int64_t l = 0; l < cfg.Lp; ++l)
        acc += double(ch.at(l)) *
               std::polar(1.0, -2.0 * kPi * double(l) * double(m) / double(cfg.Lp));
      A(i, r) = acc;
    }
  }
  return A;
}

/// MWC-on-multiband MMV: Y rows are the channel sample sequences; unknown S
/// rows are the beta-scaled slice sequences gamma_r(k).
inline MmvSystem build_mwc_mmv(const CMat& samples, const MwcConfig& cfg) {
  require(cfg.qp >= 1 && cfg.Lp >= 1 && cfg.Mp > 0, "build_mwc_mmv: bad config");
  require(samples.rows() == cfg.qp,
          "build_mwc_mmv: need one sample row per channel");
  require(cfg.chips.size() == static_cast<std::size_t>(cfg.qp),
          "build_mwc_mmv: need q' chip sequences");
  MmvSystem sys;
  sys.A = build_mwc_sensing_matrix(cfg);
  sys.Y = samples;
  sys.weights.resize(cfg.Lp);
  sys.index_map.resize(static_cast<std::size_t>(cfg.Lp));
  for (std::int64_t r = 0; r < cfg.Lp; ++r) {
    const std::int64_t m = mwc_shift_index(r, cfg.Lp);
    sys.weights(r) = mwc_beta(m, cfg);
    sys.index_map[static_cast<std::size_t>(r)] = m;
  }
  return sys;
}

/// MWC-on-multitone MMV (L' = M', T = N T_p): Y_{i,v} is channel i's
/// 1/N-normalized DFT at harmonic n_v = -floor(N/2) + v, and the unknown is
/// S_{r,v} = eta(m_r) X(n_v - N m_r).
inline MmvSystem build_mwc_multitone_mmv(const CMat& samples,
                                         const MwcConfig& cfg) {
  require(cfg.Lp == require_integer(cfg.Mp, "build_mwc_multitone_mmv: M'"),
          "build_mwc_multitone_mmv: requires L' = M'");
  require(samples.rows() == cfg.qp,
          "build_mwc_multitone_mmv: need one sample row per channel");
  const std::int64_t N = samples.cols();  // V = N when L' = M'
  require(N >= 1, "build_mwc_multitone_mmv: empty sample rows");

  MmvSystem sys;
  sys.A = build_mwc_sensing_matrix(cfg);
  sys.Y.resize(cfg.qp, N);
  const auto n = static_cast<std::size_t>(N);
  for (std::int64_t i = 0; i < cfg.qp; ++i) {
    std::vector<cdouble> row(n);
    for (std::size_t k = 0; k < n; ++k) row[k] = samples(i, std::int64_t(k));
    auto hat = fs_coeffs(row);
    for (std::int64_t v = 0; v < N; ++v) {
      const std::int64_t nv = -(N / 2) + v;  // harmonic of column v
      sys.Y(i, v) = hat[bin_index(nv, n)];
    }
  }
  sys.weights.resize(cfg.Lp);
  sys.index_map.resize(static_cast<std::size_t>(cfg.Lp));
  for (std::int64_t r = 0; r < cfg.Lp; ++r) {
    const std::int64_t m = mwc_shift_index(r, cfg.Lp);
    sys.weights(r) = mwc_eta(m, cfg.Lp);
    sys.index_map[static_cast<std::size_t>(r)] = m;
  }
  return sys;
}

// ---------------------------------------------------------------------------
// RD on multiband (§4.2 midpoint discretization)
// ---------------------------------------------------------------------------

/// Columns are midpoint frequencies omega_i = -pi W' + d_omega (i + 1/2),
/// d_omega = 2 pi W'/D. A_{k,i} = sum_{l in block k} p_l exp(j omega_i l/W');
/// the Riemann/chip weight w_i = (1/2pi) (exp(j omega_i/W') - 1)/(j omega_i)
/// * d_omega multiplies the unknown spectral density X(omega_i).
inline SmvSystem build_rd_multiband_smv(const CVec& y, const RdConfig& cfg,
                                        std::int64_t D) {
  require(D >= 1, "build_rd_multiband_smv: D must be >= 1");
  const std::int64_t Np = cfg.N(), M = cfg.M;  // N' = T W'
  require(M >= 1 && Np % M == 0, "build_rd_multiband_smv: N' mod M must be 0");
  require(cfg.chips.size() == static_cast<std::size_t>(Np),
          "build_rd_multiband_smv: chips must have length N'");
  require(y.size() == 0 || y.size() == M,
          "build_rd_multiband_smv: y must have M entries");
  const double Wp = cfg.W;
  const double dw = 2.0 * kPi * Wp / double(D);
  const std::int64_t cps = Np / M;

  SmvSystem sys;
  sys.A.resize(M, D);
  sys.y = y;
  sys.weights.resize(D);
  sys.index_map.resize(static_cast<std::size_t>(D));
  for (std::int64_t i = 0; i < D; ++i) {
    const double w = -kPi * Wp + dw * (double(i) + 0.5);
    sys.index_map[static_cast<std::size_t>(i)] = w;
    sys.weights(i) =
        (std::polar(1.0, w / Wp) - 1.0) / (kJ * w) * (dw / (2.0 * kPi));
    for (std::int64_t k = 0; k < M; ++k) {
      cdouble acc{0, 0};
      for (std::int64_t l = k * cps; l < (k + 1) * cps; ++l)
        acc += double(cfg.chips.at(l)) * std::polar(1.0, w * double(l) / Wp);
      sys.A(k, i) = acc;
    }
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Block-sparse sampler system
// ---------------------------------------------------------------------------

using BasisFn = std::function<cdouble(std::int64_t n, double t)>;

/// Default expansion family: Fourier basis on one segment with D = M rows.
/// Row n is the signed harmonic signed_bin(n, M) — identical to
/// exp(j 2 pi n t/(T/L)) on the k T/(L M) sample lattice (so the evaluation
/// matrix is a DFT matrix, condition number 1), and the minimal-bandwidth
/// interpolant between lattice points, which keeps Hermitian coefficient
/// rows real-valued on dense grids.
inline BasisFn fourier_block_basis(double T, std::int64_t L, std::int64_t M) {
  const double seg = T / double(L);
  return [seg, M](std::int64_t n, double t) {
    const std::int64_t h =
        signed_bin(static_cast<std::size_t>(((n % M) + M) % M),
                   static_cast<std::size_t>(M));
    return std::polar(1.0, 2.0 * kPi * double(h) * t / seg);
  };
}

/// rhs = Y * Psi^{-1} so that rhs = Phi * A_coef with A_coef the (row-sparse)
/// segment expansion coefficients. Psi_{n,k} = psi_n(k T/(L M)), D = M.
inline BlockSystem build_block_system(const CMat& Y,
                                      const BlockSamplerConfig& cfg,
                                      const BasisFn& basis) {
  require(cfg.q >= 1 && cfg.L >= 1 && cfg.M >= 1, "build_block_system: bad config");
  require(Y.rows() == cfg.q && Y.cols() == cfg.M,
          "build_block_system: Y must be q x M");
  require(cfg.chips.size() == static_cast<std::size_t>(cfg.q),
          "build_block_system: need q chip sequences");
  const std::int64_t D = cfg.M;  // approximation order equals sample count

  BlockSystem sys;
  sys.Y = Y;
  sys.Phi.resize(cfg.q, cfg.L);
  for (std::int64_t i = 0; i < cfg.q; ++i) {
    const auto& ch = cfg.chips[static_cast<std::size_t>(i)];
    require(ch.size() == static_cast<std::size_t>(cfg.L),
            "build_block_system: chips must have length L");
    for (std::int64_t l = 0; l < cfg.L; ++l) sys.Phi(i, l) = double(ch.at(l));
  }
  sys.Psi.resize(D, cfg.M);
  for (std::int64_t n = 0; n < D; ++n)
    for (std::int64_t k = 0; k < cfg.M; ++k)
      sys.Psi(n, k) = basis(n, cfg.T * double(k) / double(cfg.L * cfg.M));

  Eigen::JacobiSVD<CMat> svd(sys.Psi);
  const auto& sv = svd.singularValues();
  sys.cond = sv(0) / sv(sv.size() - 1);
  if (!(sys.cond < 1e12))
    throw RankError("build_block_system: Psi is numerically singular (cond " +
                    std::to_string(sys.cond) + ")");
  // rhs * Psi = Y  <=>  Psi^T rhs^T = Y^T
  CMat PsiT = sys.Psi.transpose();
  sys.rhs = PsiT.partialPivLu().solve(CMat(sys.Y.transpose())).transpose();
  return sys;
}

inline BlockSystem build_block_system(const CMat& Y,
                                      const BlockSamplerConfig& cfg) {
  return build_block_system(Y, cfg, fourier_block_basis(cfg.T, cfg.L, cfg.M));
}

}  // namespace subnyq
