#include "rica/rng.hpp"

#include <cmath>
#include <numbers>

namespace rica {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer; full-avalanche bijection on 64 bits.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix64(mix64(seed + kGolden) ^ mix64(stream + 0xd1b54a32d192ed03ULL))) {}

std::uint64_t CounterRng::next_u64() noexcept {
  return mix64(key_ ^ mix64(counter_++ + kGolden));
}

double CounterRng::uniform01() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) noexcept {
  return lo + (hi - lo) * uniform01();
}

double CounterRng::normal() noexcept {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(th);
  has_cached_normal_ = true;
  return r * std::cos(th);
}

std::complex<double> CounterRng::circular_normal() noexcept {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

double CounterRng::sign() noexcept {
  return (next_u64() & 1u) ? 1.0 : -1.0;
}

std::uint64_t CounterRng::derive(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a ^ mix64(b + kGolden));
}

}  // namespace rica
