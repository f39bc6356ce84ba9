#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "subnyq/common.hpp"
#include "subnyq/fft.hpp"

namespace subnyq {

/// (1/(T*W')) * ||x - xhat||^2 with the sum scaled by the grid spacing
/// (T/n), so the value approximates (1/(T*W')) * integral |x-xhat|^2 dt and
/// is invariant to the grid resolution for bandlimited inputs.
inline double avg_squared_error(std::span<const cdouble> x,
                                std::span<const cdouble> xhat, double T,
                                double Wp) {
  require(T > 0 && Wp > 0, "avg_squared_error: T and W' must be positive");
  require(x.size() == xhat.size() && !x.empty(),
          "avg_squared_error: grids must be aligned and equal length");
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) acc += std::norm(x[j] - xhat[j]);
  return acc * (T / double(x.size())) / (T * Wp);
}

/// Edge-excluded variant: drops grid points with t < edge or t >= T - edge
/// from both signals (consistently), keeping the same normalization domain.
inline double avg_squared_error(std::span<const cdouble> x,
                                std::span<const cdouble> xhat, double T,
                                double Wp, double edge_seconds) {
  require(T > 0 && Wp > 0, "avg_squared_error: T and W' must be positive");
  require(x.size() == xhat.size() && !x.empty(),
          "avg_squared_error: grids must be aligned and equal length");
  require(edge_seconds >= 0 && 2.0 * edge_seconds < T,
          "avg_squared_error: edge exclusion must leave a nonempty interior");
  const double dt = T / double(x.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double t = double(j) * dt;
    if (t < edge_seconds || t >= T - edge_seconds) continue;
    acc += std::norm(x[j] - xhat[j]);
  }
  return acc * dt / (T * Wp);
}

/// ||x - xhat||^2 / ||x||^2 on aligned grids (grid spacing cancels).
inline double normalized_squared_error(std::span<const double> x,
                                       std::span<const double> xhat) {
  require(x.size() == xhat.size() && !x.empty(),
          "normalized_squared_error: grids must be aligned and equal length");
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    num += (x[j] - xhat[j]) * (x[j] - xhat[j]);
    den += x[j] * x[j];
  }
  require(den > 0.0, "normalized_squared_error: reference signal is zero");
  return num / den;
}

/// Quantile with linear interpolation between order statistics (the
/// continuous convention: rank (n-1)*p). p in [0, 1].
inline double quantile(std::vector<double> values, double p) {
  require(!values.empty(), "quantile: empty sample");
  require(p >= 0.0 && p <= 1.0, "quantile: p must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double rank = p * double(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = static_cast<std::size_t>(std::ceil(rank));
  const double frac = rank - double(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

/// Smallest B (Hz) such that the spectral energy within |f| <= B reaches
/// `fraction` of the total. The grid covers [0, T) at `rate` samples/second;
/// bins are attributed their signed frequency via the usual FFT layout.
inline double essential_bandwidth(std::span<const double> grid, double rate,
                                  double fraction) {
  require(!grid.empty() && rate > 0, "essential_bandwidth: bad grid");
  require(fraction > 0.0 && fraction <= 1.0,
          "essential_bandwidth: fraction must be in (0, 1]");
  const std::size_t n = grid.size();
  std::vector<cdouble> cgrid(n);
  for (std::size_t j = 0; j < n; ++j) cgrid[j] = cdouble(grid[j], 0.0);
  auto c = fs_coeffs(cgrid);
  // energy per |signed bin|; bin b corresponds to frequency b / T = b*rate/n
  std::vector<double> by_absbin(n / 2 + 1, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto b = static_cast<std::size_t>(std::abs(signed_bin(k, n)));
    const double e = std::norm(c[k]);
    by_absbin[b] += e;
    total += e;
  }
  require(total > 0.0, "essential_bandwidth: zero signal");
  double acc = 0.0;
  for (std::size_t b = 0; b < by_absbin.size(); ++b) {
    acc += by_absbin[b];
    if (acc >= fraction * total)
      return double(b) * rate / double(n);
  }
  return rate / 2.0;
}

}  // namespace subnyq
