#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <utility>

#include "rica/errors.hpp"
#include "rica/rng.hpp"
#include "rica/signal.hpp"
#include "rica/types.hpp"

namespace rica {

/// Source alphabets, all generated unit-power and zero-mean. In the real
/// regime uniform covers [-sqrt(3), sqrt(3)]; in the complex regime it draws
/// real and imaginary parts independently (each with variance 1/2). BPSK in
/// the complex regime keeps its real +/-1 values and is the canonical
/// non-circular source.
enum class SourceKind { uniform, bpsk, qam4 };

enum class MixingKind { givens, random_orthogonal, random_unitary, random_general };

struct Scenario {
  SourceKind sources = SourceKind::uniform;
  Index K = 2;
  Index L = 2;
  Index T = 100;
  MixingKind mixing = MixingKind::givens;
  /// SNR in dB; absent means noiseless. With orthonormal mixing the per-sensor
  /// noise power is sigma_n^2 = 1 / SNR.
  std::optional<double> snr_db;
  int trials = 1;
  std::uint64_t base_seed = 1;

  double noise_power() const {
    return snr_db ? std::pow(10.0, -*snr_db / 10.0) : 0.0;
  }
};

namespace detail {

// sub-stream purposes under one (base_seed, trial) pair
inline constexpr std::uint64_t kSourceStream = 1;
inline constexpr std::uint64_t kMixingStream = 2;
inline constexpr std::uint64_t kNoiseStream = 3;

template <RegimeScalar S>
S draw_source(SourceKind kind, CounterRng& rng) {
  if constexpr (is_complex_v<S>) {
    switch (kind) {
      case SourceKind::bpsk: return S{rng.sign(), 0.0};
      case SourceKind::qam4: {
        constexpr double h = std::numbers::sqrt2 / 2.0;
        return S{h * rng.sign(), h * rng.sign()};
      }
      case SourceKind::uniform: {
        const double a = std::sqrt(1.5);
        return S{rng.uniform(-a, a), rng.uniform(-a, a)};
      }
    }
  } else {
    switch (kind) {
      case SourceKind::bpsk: return rng.sign();
      case SourceKind::uniform: {
        constexpr double r = 1.7320508075688772;  // sqrt(3)
        return rng.uniform(-r, r);
      }
      default:
        throw ConfigError("benchgen: complex source alphabet in the real regime");
    }
  }
  throw ConfigError("benchgen: unknown source kind");
}

}  // namespace detail

/// Random orthogonal matrix via QR of a Gaussian matrix with sign-fixed
/// diagonal, which makes the draw unique and Haar-distributed.
inline Eigen::MatrixXd random_orthogonal(Index n, CounterRng& rng) {
  Eigen::MatrixXd a(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

/// Random unitary matrix; phase-fixed diagonal for uniqueness.
inline Eigen::MatrixXcd random_unitary(Index n, CounterRng& rng) {
  Eigen::MatrixXcd a(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = rng.circular_normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    const double m = std::abs(d);
    if (m > 0.0) q.col(j) *= d / m;
  }
  return q;
}

/// Planar rotation of angle theta.
inline Eigen::Matrix2d givens_rotation(double theta) {
  Eigen::Matrix2d h;
  h << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return h;
}

/// Draws the trial's sources and mixing model, deterministically from
/// (base_seed, trial).
template <RegimeScalar S>
std::pair<SignalBlock<S>, MixingModel<S>> generate(const Scenario& sc, int trial) {
  if (trial < 0 || trial >= sc.trials) {
    throw ConfigError("generate: trial index " + std::to_string(trial) + " out of range");
  }
  if (sc.K > sc.L) throw DimensionError("generate: K <= L required");
  const std::uint64_t trial_seed =
      CounterRng::derive(sc.base_seed, static_cast<std::uint64_t>(trial));

  CounterRng src_rng(trial_seed, detail::kSourceStream);
  Matrix<S> s(sc.K, sc.T);
  for (Index k = 0; k < sc.K; ++k) {
    for (Index t = 0; t < sc.T; ++t) s(k, t) = detail::draw_source<S>(sc.sources, src_rng);
  }

  CounterRng mix_rng(trial_seed, detail::kMixingStream);
  Matrix<S> h(sc.L, sc.K);
  switch (sc.mixing) {
    case MixingKind::givens: {
      if (sc.K != 2 || sc.L != 2) throw DimensionError("generate: Givens mixing needs K = L = 2");
      const double theta = mix_rng.uniform(0.0, 2.0 * std::numbers::pi);
      h = givens_rotation(theta).cast<S>();
      break;
    }
    case MixingKind::random_orthogonal: {
      if (sc.K != sc.L) throw DimensionError("generate: orthogonal mixing needs K = L");
      h = random_orthogonal(sc.L, mix_rng).cast<S>();
      break;
    }
    case MixingKind::random_unitary: {
      if constexpr (!is_complex_v<S>) {
        throw ConfigError("generate: unitary mixing needs the complex regime");
      } else {
        if (sc.K != sc.L) throw DimensionError("generate: unitary mixing needs K = L");
        h = random_unitary(sc.L, mix_rng);
      }
      break;
    }
    case MixingKind::random_general: {
      for (Index i = 0; i < sc.L; ++i) {
        for (Index j = 0; j < sc.K; ++j) {
          if constexpr (is_complex_v<S>) {
            h(i, j) = mix_rng.circular_normal();
          } else {
            h(i, j) = mix_rng.normal();
          }
        }
      }
      break;
    }
  }

  return {SignalBlock<S>(std::move(s)), MixingModel<S>(std::move(h), sc.noise_power())};
}

/// Observation block for a trial: mix(model, sources) with the noise stream
/// derived from the same (base_seed, trial) pair.
template <RegimeScalar S>
SignalBlock<S> observe(const Scenario& sc, int trial, const MixingModel<S>& model,
                       const SignalBlock<S>& sources) {
  const std::uint64_t trial_seed =
      CounterRng::derive(sc.base_seed, static_cast<std::uint64_t>(trial));
  return mix(model, sources, CounterRng::derive(trial_seed, detail::kNoiseStream));
}

}  // namespace rica
