// Shared aliases, constants and small utilities for the subnyq toolkit.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <future>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace subnyq {

inline constexpr const char* kVersion = "0.1.0";

using cdouble = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cdouble kJ{0.0, 1.0};

/// Thrown when a matrix expected to be well conditioned is numerically
/// rank deficient (e.g. a singular expansion basis).
struct RankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Precondition check for user-supplied parameters.
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

/// round(x) if x is within tol of an integer, otherwise throws.
/// Used for grid/rate divisibility preconditions (R*W*T, R*M', ...).
inline std::int64_t require_integer(double x, const std::string& what,
                                    double tol = 1e-9) {
  const double r = std::round(x);
  require(std::abs(x - r) <= tol * std::max(1.0, std::abs(x)),
          what + " must be an integer (got " + std::to_string(x) + ")");
  return static_cast<std::int64_t>(r);
}

/// Runs fn(i) for i in [0, n) with at most `jobs` concurrent workers.
/// Static block partition; results must be written to disjoint slots so the
/// outcome is independent of the job count.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  std::vector<std::future<void>> work;
  work.reserve(jobs);
  const std::size_t chunk = (n + jobs - 1) / jobs;
  for (unsigned w = 0; w < jobs; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    work.push_back(std::async(std::launch::async, [lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    }));
  }
  for (auto& f : work) f.get();  // propagates exceptions
}

}  // namespace subnyq
