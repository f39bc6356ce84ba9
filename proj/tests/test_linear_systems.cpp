#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "subnyq/common.hpp"
#include "subnyq/fft.hpp"
#include "subnyq/linear_systems.hpp"
#include "subnyq/rng.hpp"
#include "subnyq/samplers.hpp"
#include "subnyq/signals.hpp"

using namespace subnyq;

namespace {

ChippingSequence flat_chips(std::size_t n, double rate) {
  ChippingSequence ch;
  ch.values.assign(n, 1);
  ch.chip_rate = rate;
  ch.periodic = false;
  ch.seed = 0;
  return ch;
}

// Periodic grid of a multitone on n points (T-periodic trig polynomial).
std::vector<cdouble> multitone_grid(const MultitoneSignal& sig, std::size_t n) {
  std::vector<cdouble> c(n, cdouble{0, 0});
  for (std::size_t i = 0; i < sig.support.size(); ++i)
    c[bin_index(sig.support[i], n)] += sig.coeffs[i];
  return fs_synthesis(c);
}

}  // namespace

TEST_CASE("build_rd_smv: accumulator structure and square corner") {
  // N = 4, M = 2, all-ones chips: Sigma = [[1,1,0,0],[0,0,1,1]].
  RdConfig cfg{0.5, 8.0, 2, flat_chips(4, 8.0)};
  auto sys = build_rd_smv(cfg);
  REQUIRE(sys.A.rows() == 2);
  REQUIRE(sys.A.cols() == 4);
  CMat Psi(4, 4);
  for (int l = 0; l < 4; ++l)
    for (int r = 0; r < 4; ++r)
      Psi(l, r) = std::polar(1.0, 2.0 * kPi * double(r - 2) * l / 4.0);
  CMat Sigma = sys.A * Psi.adjoint() / 4.0;  // Psi^{-1} = Psi^H / N
  CMat expect = CMat::Zero(2, 4);
  expect(0, 0) = expect(0, 1) = expect(1, 2) = expect(1, 3) = 1.0;
  REQUIRE((Sigma - expect).cwiseAbs().maxCoeff() < 1e-12);

  // N = M: one chip per block, A_{k,r} = p_k exp(j 2 pi n_r k / N).
  auto chips = gen_chipping(11, 4, 8.0, false);
  RdConfig sq{0.5, 8.0, 4, chips};
  auto ssys = build_rd_smv(sq);
  REQUIRE(ssys.A.rows() == 4);
  REQUIRE(ssys.A.cols() == 4);
  for (int k = 0; k < 4; ++k)
    for (int r = 0; r < 4; ++r) {
      cdouble want = double(chips.at(k)) *
                     std::polar(1.0, 2.0 * kPi * double(r - 2) * k / 4.0);
      REQUIRE(std::abs(ssys.A(k, r) - want) < 1e-14);
    }
}

TEST_CASE("build_rd_smv: weights and index map") {
  auto cfg = make_rd_config(0.5, 128.0, 8, 21);
  auto sys = build_rd_smv(cfg);
  REQUIRE(sys.index_map.size() == 64);
  REQUIRE(sys.index_map.front() == -32.0);
  REQUIRE(sys.index_map.back() == 31.0);
  // alpha(0) = 1/W sits at column N/2.
  REQUIRE(std::abs(sys.weights(32) - cdouble{1.0 / 128.0, 0.0}) < 1e-15);
  for (std::int64_t r = 0; r < 64; ++r) {
    REQUIRE(std::abs(sys.weights(r)) > 0.0);
    REQUIRE(std::abs(sys.weights(r) - rd_alpha(-32 + r, 0.5, 64)) == 0.0);
  }
}

TEST_CASE("build_rd_smv: matrix action matches analytic sampler") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto cfg = make_rd_config(0.5, 128.0, 8, seed);
    auto sig = gen_random_multitone(0.5, 128.0, 4, seed + 1000);
    auto sys = build_rd_smv(cfg);
    CVec X = CVec::Zero(64);
    for (std::size_t i = 0; i < sig.support.size(); ++i)
      X(sig.support[i] + 32) = sig.coeffs[i];
    CVec y_sys = sys.A * sys.weights.cwiseProduct(X);
    auto y_ana = rd_sample_analytic(sig, cfg);
    REQUIRE(y_ana.size() == y_sys.size());
    double err = 0.0;
    for (std::int64_t k = 0; k < y_sys.size(); ++k)
      err = std::max(err, std::abs(y_sys(k) - y_ana(k)));
    REQUIRE(err < 1e-10);
  }
}

TEST_CASE("build_rd_smv: validation") {
  auto cfg = make_rd_config(0.5, 128.0, 8, 3);
  cfg.M = 7;  // 64 % 7 != 0
  REQUIRE_THROWS_AS(build_rd_smv(cfg), std::invalid_argument);
  auto bad = make_rd_config(0.5, 128.0, 8, 3);
  bad.chips.values.pop_back();
  REQUIRE_THROWS_AS(build_rd_smv(bad), std::invalid_argument);
}

TEST_CASE("mwc_shift_index covers the signed slice range") {
  REQUIRE(mwc_shift_index(0, 50) == -24);
  REQUIRE(mwc_shift_index(49, 50) == 25);
  REQUIRE(mwc_shift_index(0, 5) == -2);
  REQUIRE(mwc_shift_index(4, 5) == 2);
  // Bijective over rows, consecutive integers.
  for (std::int64_t r = 1; r < 50; ++r)
    REQUIRE(mwc_shift_index(r, 50) == mwc_shift_index(r - 1, 50) + 1);
}

TEST_CASE("mwc_beta and mwc_eta: values and conjugate link to rd_alpha") {
  MwcConfig cfg{500.0, 50, 20.0, 0, {}, BoundaryMode::periodic};
  const double Tp = cfg.T_p();  // 0.1
  REQUIRE(std::abs(mwc_beta(0, cfg) - cdouble{500.0 / (20.0 * 50.0), 0.0}) <
          1e-15);
  // beta(m) = (W'/(M' T_p)) * conj(alpha(m)) with alpha on (T_p, L') — the
  // RD chip weight and the MWC slice weight are the same object up to rate
  // scaling and conjugation.
  for (std::int64_t m = -30; m <= 30; ++m) {
    cdouble rhs = (cfg.Wp / (cfg.Mp * Tp)) * std::conj(rd_alpha(m, Tp, 50));
    REQUIRE(std::abs(mwc_beta(m, cfg) - rhs) < 1e-12);
  }
  REQUIRE(std::abs(mwc_eta(0, 16) - cdouble{1.0 / 16.0, 0.0}) < 1e-15);
  for (std::int64_t m = -20; m <= 20; ++m)
    REQUIRE(std::abs(mwc_eta(m, 16) - mwc_rho(m, 16)) == 0.0);
}

TEST_CASE("build_mwc_mmv: dimensions, index map, chip-coefficient identity") {
  auto cfg = make_mwc_config(500.0, 50, 20.0, 25, 17);
  CMat samples = CMat::Zero(25, 8);
  auto sys = build_mwc_mmv(samples, cfg);
  REQUIRE(sys.A.rows() == 25);
  REQUIRE(sys.A.cols() == 50);
  REQUIRE(sys.Y.rows() == 25);
  REQUIRE(sys.Y.cols() == 8);
  REQUIRE(sys.index_map.front() == -24);
  REQUIRE(sys.index_map.back() == 25);
  for (std::int64_t r = 0; r < 50; ++r)
    REQUIRE(std::abs(sys.weights(r) - mwc_beta(sys.index_map[r], cfg)) == 0.0);
  // rho(m_r) * A_{i,r} is exactly the sampler's chip spectral coefficient.
  for (std::int64_t i = 0; i < 25; ++i)
    for (std::int64_t r = 0; r < 50; ++r) {
      const std::int64_t m = sys.index_map[static_cast<std::size_t>(r)];
      cdouble want = mwc_chip_coeff(cfg.chips[i], m, 50);
      REQUIRE(std::abs(mwc_rho(m, 50) * sys.A(i, r) - want) < 1e-12);
    }
}

TEST_CASE("build_mwc_mmv: square solve localizes planted slices") {
  // Bands strictly inside the slices with shift indices m = 3 and m = -8
  // (slice centered at -m * omega_p): rows r = m + 24 -> {27, 16}.
  const double Wp = 500.0, wp = 2.0 * kPi * Wp / 50.0;  // omega_p = 20 pi
  std::vector<std::pair<double, double>> bands{
      {-3.0 * wp - wp / 4.0, -3.0 * wp + wp / 4.0},
      {8.0 * wp - wp / 4.0, 8.0 * wp + wp / 4.0}};
  auto sig = gen_multiband(bands, {1.0, 1.0}, Wp, 1.0, 2, 99,
                           AmplitudeMode::random);
  auto cfg = make_mwc_config(Wp, 50, 20.0, 50, 4);  // q' = L': square
  auto Y = mwc_sample(sig.grid, cfg, 2);
  auto sys = build_mwc_mmv(Y, cfg);
  REQUIRE(sys.Y.cols() == 25);
  CMat S = sys.A.partialPivLu().solve(sys.Y);
  Eigen::VectorXd norms(50);
  for (std::int64_t r = 0; r < 50; ++r) norms(r) = S.row(r).norm();
  const double top = norms.maxCoeff();
  REQUIRE(top > 0.0);
  for (std::int64_t r = 0; r < 50; ++r) {
    if (r == 27 || r == 16) {
      REQUIRE(norms(r) > 0.1 * top);
    } else {
      REQUIRE(norms(r) < 1e-6 * top);
    }
  }
}

TEST_CASE("build_mwc_multitone_mmv: N = 1 collapses to an SMV") {
  // T = T_p: one sample per channel, row r pairs with tone X(-m_r).
  const double Wp = 160.0;
  auto cfg = make_mwc_config(Wp, 16, 16.0, 5, 8);
  std::vector<std::int64_t> support{-8, -5, 3, 7};
  std::vector<cdouble> coeffs;
  Rng rng(31);
  for (std::size_t i = 0; i < support.size(); ++i) coeffs.push_back(rng.cnormal());
  auto sig = make_multitone(0.1, Wp, support, coeffs);
  auto grid = multitone_grid(sig, 32);  // R = 2 -> n = 32
  auto Ysamp = mwc_sample(grid, cfg, 2);
  REQUIRE(Ysamp.cols() == 1);
  auto sys = build_mwc_multitone_mmv(Ysamp, cfg);
  REQUIRE(sys.Y.cols() == 1);
  // Direct SMV prediction: y_i = sum_r A_{i,r} eta(m_r) X(-m_r).
  for (std::int64_t i = 0; i < 5; ++i) {
    cdouble pred{0, 0};
    for (std::int64_t r = 0; r < 16; ++r) {
      const std::int64_t m = sys.index_map[static_cast<std::size_t>(r)];
      for (std::size_t t = 0; t < support.size(); ++t)
        if (support[t] == -m) pred += sys.A(i, r) * sys.weights(r) * coeffs[t];
    }
    REQUIRE(std::abs(sys.Y(i, 0) - pred) < 1e-12);
  }
}

TEST_CASE("build_mwc_multitone_mmv: planted tones satisfy Y = A S exactly") {
  // W' = 100, L' = M' = 16, N = 8 samples per channel (T = 1.28 s).
  const double Wp = 100.0;
  auto cfg = make_mwc_config(Wp, 16, 16.0, 6, 12);
  // Tones at harmonics -15 = 1 - 8*2 and 38 = -2 - 8*(-5): distinct blocks,
  // in-block offsets |n_v| <= 3.
  std::vector<std::int64_t> support{-15, 38};
  std::vector<cdouble> coeffs{{0.7, -0.3}, {-0.2, 1.1}};
  auto sig = make_multitone(1.28, Wp, support, coeffs);
  auto grid = multitone_grid(sig, 256);  // R = 2 -> n = 256
  auto Ysamp = mwc_sample(grid, cfg, 2);
  REQUIRE(Ysamp.cols() == 8);
  auto sys = build_mwc_multitone_mmv(Ysamp, cfg);
  CMat S = CMat::Zero(16, 8);  // S_{r,v} = eta(m_r) X(n_v - 8 m_r)
  S(2 + 7, 1 + 4) = mwc_eta(2, 16) * coeffs[0];  // r = m + 7, v = n_v + 4
  S(-5 + 7, -2 + 4) = mwc_eta(-5, 16) * coeffs[1];
  double scale = sys.Y.cwiseAbs().maxCoeff();
  REQUIRE(scale > 0.0);
  REQUIRE((sys.Y - sys.A * S).cwiseAbs().maxCoeff() < 1e-12 * scale);
}

TEST_CASE("build_mwc_multitone_mmv: requires L' = M'") {
  auto cfg = make_mwc_config(500.0, 50, 20.0, 3, 5);
  CMat samples = CMat::Zero(3, 4);
  REQUIRE_THROWS_AS(build_mwc_multitone_mmv(samples, cfg),
                    std::invalid_argument);
}

TEST_CASE("build_rd_multiband_smv: discretization error halves with D") {
  const double Wp = 200.0, T = 0.25;
  std::vector<std::pair<double, double>> bands{{-160.0 * kPi, -120.0 * kPi},
                                               {40.0 * kPi, 104.0 * kPi}};
  auto sig = gen_multiband(bands, {1.0, 1.0}, Wp, T, 4, 7,
                           AmplitudeMode::random);
  auto cfg = make_rd_config(T, Wp, 10, 41);  // N' = 50, 5 chips per block
  auto dense = rd_dense_grid(sig);
  auto y = rd_sample_grid(dense, cfg, 4);

  auto rel_err = [&](std::int64_t D) {
    auto sys = build_rd_multiband_smv(y, cfg, D);
    REQUIRE(sys.A.cols() == D);
    const double dw = 2.0 * kPi * Wp / double(D);
    CVec X = CVec::Zero(D);
    const std::size_t n = sig.grid.size();
    auto c = fs_coeffs(sig.grid);
    double cmax = 0.0;
    for (const auto& v : c) cmax = std::max(cmax, std::abs(v));
    for (std::size_t u = 0; u < n; ++u) {
      if (std::abs(c[u]) <= 1e-12 * cmax) continue;  // FFT roundtrip dust
      const double w = 2.0 * kPi * double(signed_bin(u, n)) / T;
      const auto i = static_cast<std::int64_t>(std::floor((w + kPi * Wp) / dw));
      REQUIRE(i >= 0);
      REQUIRE(i < D);
      X(i) += (2.0 * kPi / dw) * c[u];
    }
    CVec resid = sys.A * sys.weights.cwiseProduct(X) - sys.y;
    return resid.norm() / sys.y.norm();
  };

  const double e256 = rel_err(256);
  const double e512 = rel_err(512);
  const double e1024 = rel_err(1024);
  REQUIRE(e512 < 0.65 * e256);
  REQUIRE(e1024 < 0.65 * e512);
  REQUIRE(e1024 < 0.1);
  REQUIRE_THROWS_AS(build_rd_multiband_smv(y, cfg, 0), std::invalid_argument);
}

TEST_CASE("build_block_system: Fourier basis is perfectly conditioned") {
  auto cfg = make_block_config(1.0, 10, 40, 8, 23);
  CMat Y = CMat::Zero(8, 40);
  auto sys = build_block_system(Y, cfg);
  REQUIRE(sys.Phi.rows() == 8);
  REQUIRE(sys.Phi.cols() == 10);
  REQUIRE(sys.Psi.rows() == 40);
  REQUIRE(sys.Psi.cols() == 40);
  REQUIRE(sys.rhs.rows() == 8);
  REQUIRE(sys.rhs.cols() == 40);
  REQUIRE(sys.cond == Catch::Approx(1.0).margin(1e-9));
  for (std::int64_t i = 0; i < 8; ++i)
    for (std::int64_t l = 0; l < 10; ++l)
      REQUIRE(std::abs(sys.Phi(i, l)) == 1.0);
}

TEST_CASE("build_block_system: square corner recovers in-span coefficients") {
  // q = L = 6, M = D = 12: Phi and Psi both invertible, so the expansion
  // coefficients come back exactly for a signal built from the basis.
  const double T = 0.6;
  const std::int64_t L = 6, M = 12;
  auto cfg = make_block_config(T, L, M, 6, 29);
  REQUIRE(std::abs(Eigen::MatrixXd(
              [&] {
                Eigen::MatrixXd P(6, L);
                for (int i = 0; i < 6; ++i)
                  for (int l = 0; l < L; ++l) P(i, l) = cfg.chips[i].at(l);
                return P;
              }())
              .determinant()) > 1e-9);

  const double seg = T / double(L);
  Rng rng(77);
  std::vector<std::vector<cdouble>> alpha(L, std::vector<cdouble>(M, {0, 0}));
  for (std::int64_t l = 0; l < L; ++l) {
    alpha[l][0] = cdouble{rng.uniform(-1.0, 1.0), 0.0};
    for (std::int64_t nn = 1; nn <= 5; ++nn) {
      cdouble b = rng.cnormal();
      alpha[l][static_cast<std::size_t>(nn)] = b;
      alpha[l][static_cast<std::size_t>(M - nn)] = std::conj(b);
    }
  }
  const double rate = 360.0;  // stride 3 on the block sampler's lattice
  const auto n = static_cast<std::size_t>(std::llround(rate * T));
  BlockSparseSignal sig;
  sig.t0 = T;
  sig.intervals = {{0.0, T}};
  sig.dense_rate = rate;
  sig.smoothness = "in-span trig";
  sig.grid.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = double(j) / rate;
    auto l = std::min<std::int64_t>(L - 1,
                                    static_cast<std::int64_t>(t / seg));
    const double tau = t - double(l) * seg;
    double v = alpha[l][0].real();
    for (std::int64_t nn = 1; nn <= 5; ++nn)
      v += 2.0 * std::real(alpha[l][static_cast<std::size_t>(nn)] *
                           std::polar(1.0, 2.0 * kPi * double(nn) * tau / seg));
    sig.grid[j] = v;
  }
  auto Y = block_sample(sig, cfg);
  auto sys = build_block_system(Y, cfg);
  CMat PhiC = sys.Phi.cast<cdouble>();
  CMat A_rec = PhiC.partialPivLu().solve(sys.rhs);
  for (std::int64_t l = 0; l < L; ++l)
    for (std::int64_t nn = 0; nn < M; ++nn)
      REQUIRE(std::abs(A_rec(l, nn) -
                       alpha[l][static_cast<std::size_t>(nn)]) < 1e-8);
}

TEST_CASE("build_block_system: singular basis raises RankError") {
  auto cfg = make_block_config(0.4, 2, 4, 2, 5);
  CMat Y = CMat::Zero(2, 4);
  BasisFn constant = [](std::int64_t, double) { return cdouble{1.0, 0.0}; };
  REQUIRE_THROWS_AS(build_block_system(Y, cfg, constant), RankError);
  CMat bad = CMat::Zero(3, 4);
  REQUIRE_THROWS_AS(build_block_system(bad, cfg), std::invalid_argument);
}
