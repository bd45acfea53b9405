#pragma once

#include <complex>
#include <cstdint>

namespace rica {

/// Deterministic counter-based generator. Every output is a pure function of
/// (seed, stream, counter), so independent streams derived from one
/// experiment seed can be consumed in any order or on any thread and still
/// reproduce bit-identically.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept;
  double uniform(double lo, double hi) noexcept;

  /// Standard normal via Box-Muller (pairs cached).
  double normal() noexcept;

  /// Circular complex Gaussian with E{|z|^2} = 1, E{z^2} = 0.
  std::complex<double> circular_normal() noexcept;

  /// Fair coin mapped to -1 / +1.
  double sign() noexcept;

  /// Stable 64-bit combination of two values, used to derive per-trial and
  /// per-purpose sub-streams from a single experiment seed.
  static std::uint64_t derive(std::uint64_t a, std::uint64_t b) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace rica
