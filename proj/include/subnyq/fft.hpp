// FFT wrapper (FFTW3 backend) with the toolkit's fixed conventions:
//
//   fft  : X[u] = sum_k x[k] exp(-j 2pi u k / n)      (unnormalized analysis)
//   ifft : x[k] = (1/n) sum_u X[u] exp(+j 2pi u k / n)
//
// A length-n grid over [0,T) therefore has Fourier-series coefficients
// c = fft(x)/n at frequencies omega_u = 2*pi*u/T with u the signed bin index
// (FFT order: u = k for k < n/2, u = k - n otherwise).
#pragma once

#include <fftw3.h>

#include <mutex>
#include <span>
#include <vector>

#include "subnyq/common.hpp"

namespace subnyq {

namespace detail {
inline std::mutex& fftw_mutex() {
  static std::mutex m;  // FFTW plan create/destroy is not thread-safe
  return m;
}

inline std::vector<cdouble> fftw_transform(std::span<const cdouble> x, int dir) {
  std::vector<cdouble> in(x.begin(), x.end());
  std::vector<cdouble> out(x.size());
  if (x.empty()) return out;
  fftw_plan plan;
  {
    std::lock_guard lk(fftw_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(x.size()),
                            reinterpret_cast<fftw_complex*>(in.data()),
                            reinterpret_cast<fftw_complex*>(out.data()),
                            dir, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lk(fftw_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}
}  // namespace detail

inline std::vector<cdouble> fft(std::span<const cdouble> x) {
  return detail::fftw_transform(x, FFTW_FORWARD);
}

inline std::vector<cdouble> ifft(std::span<const cdouble> X) {
  auto out = detail::fftw_transform(X, FFTW_BACKWARD);
  const double inv = X.empty() ? 1.0 : 1.0 / static_cast<double>(X.size());
  for (auto& v : out) v *= inv;
  return out;
}

/// FFT array index -> signed bin u in [-n/2, (n-1)/2].
inline std::int64_t signed_bin(std::size_t idx, std::size_t n) {
  const auto i = static_cast<std::int64_t>(idx);
  const auto sn = static_cast<std::int64_t>(n);
  return i < (sn + 1) / 2 ? i : i - sn;
}

/// Signed bin -> FFT array index (wraps modulo n).
inline std::size_t bin_index(std::int64_t u, std::size_t n) {
  const auto sn = static_cast<std::int64_t>(n);
  return static_cast<std::size_t>(((u % sn) + sn) % sn);
}

/// Fourier-series coefficients c_u = fft(x)/n of one period (FFT bin order).
inline std::vector<cdouble> fs_coeffs(std::span<const cdouble> x) {
  auto c = fft(x);
  const double inv = x.empty() ? 1.0 : 1.0 / static_cast<double>(x.size());
  for (auto& v : c) v *= inv;
  return c;
}

/// Inverse of fs_coeffs: x[k] = sum_u c_u exp(+j 2pi u k / n).
inline std::vector<cdouble> fs_synthesis(std::span<const cdouble> c) {
  auto x = ifft(c);
  const double n = static_cast<double>(c.size());
  for (auto& v : x) v *= n;
  return x;
}

}  // namespace subnyq
