// Counter-based splittable PRNG (SplitMix64).
//
// Every random draw in the toolkit goes through this generator so that runs
// are bit-reproducible across platforms. Independent streams are derived by
// keying: Rng::keyed(seed, {point, trial, channel, purpose}) gives each
// (experiment, trial, channel) its own deterministic stream, so trials can be
// generated in any order or in parallel without affecting results.
#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "subnyq/common.hpp"

namespace subnyq {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Derives a stream key from (seed, ids...). Distinct id tuples give
  /// statistically independent streams.
  static Rng keyed(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t h = mix(seed + kGamma);
    for (std::uint64_t id : ids) h = mix(h ^ mix(id + kGamma));
    return Rng(h);
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform on [0,1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Standard normal via Box-Muller (deterministic, no std::distribution).
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  /// Circular complex normal with E|z|^2 = 1.
  cdouble cnormal() {
    const double re = normal();
    const double im = normal();
    return {re * std::sqrt(0.5), im * std::sqrt(0.5)};
  }

  /// Fair +/-1.
  int sign() { return (next_u64() >> 63) ? 1 : -1; }

  /// Uniform integer in [0, n) without modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  /// k distinct indices drawn uniformly from [0, n), in draw order.
  std::vector<std::size_t> distinct(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k && i < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace subnyq
