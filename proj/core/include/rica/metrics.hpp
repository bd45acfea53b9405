#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rica/errors.hpp"
#include "rica/signal.hpp"
#include "rica/types.hpp"

namespace rica {

/// dB floor used when an estimate matches a source exactly; keeps -inf out
/// of CSV output.
inline constexpr double kSmseFloorDb = -300.0;

inline double to_db(double linear) {
  if (linear <= 1e-30) return kSmseFloorDb;
  return 10.0 * std::log10(linear);
}

struct SmsePair {
  Index source = 0;
  Index estimate = 0;
  double smse = 0.0;  // linear
  double smse_db = 0.0;
};

struct SmseResult {
  std::vector<SmsePair> per_pair;  // in greedy selection order
  double average = 0.0;            // linear mean over matched pairs
  double average_db = 0.0;
  /// pairing[k] = index of the estimate matched to source k.
  std::vector<Index> pairing;
};

/// Average signal mean square error with per-pair optimal scaling
/// alpha = E{s shat*}/E{|shat|^2} and greedy pairing: the globally smallest
/// entry is matched first, then its row and column are removed, and so on.
/// Sources are assumed unit-power; the metric is relative to that scale.
/// A zero-power estimate pairs with SMSE = +inf.
template <RegimeScalar S>
SmseResult smse(const SignalBlock<S>& sources, const SignalBlock<S>& estimates) {
  if (sources.samples() != estimates.samples()) {
    throw DimensionError("smse: sample counts differ: " + std::to_string(sources.samples()) +
                         " vs " + std::to_string(estimates.samples()));
  }
  const Index K = sources.channels();
  const Index M = estimates.channels();
  const double T = static_cast<double>(sources.samples());

  // E{|s_k - alpha shat_l|^2} = E{|s_k|^2} - |E{s_k shat_l*}|^2 / E{|shat_l|^2}
  const Matrix<S> cross = sources.data() * estimates.data().adjoint() / T;
  Eigen::VectorXd src_power(K), est_power(M);
  for (Index k = 0; k < K; ++k) src_power[k] = sources.data().row(k).squaredNorm() / T;
  for (Index l = 0; l < M; ++l) est_power[l] = estimates.data().row(l).squaredNorm() / T;

  Eigen::MatrixXd err(K, M);
  for (Index k = 0; k < K; ++k) {
    for (Index l = 0; l < M; ++l) {
      if (est_power[l] <= 0.0) {
        err(k, l) = std::numeric_limits<double>::infinity();
      } else {
        err(k, l) = std::max(0.0, src_power[k] - Eigen::numext::abs2(cross(k, l)) / est_power[l]);
      }
    }
  }

  SmseResult res;
  res.pairing.assign(K, -1);
  std::vector<bool> used_src(K, false), used_est(M, false);
  const Index pairs = std::min(K, M);
  double total = 0.0;
  for (Index n = 0; n < pairs; ++n) {
    Index bk = -1, bl = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < K; ++k) {
      if (used_src[k]) continue;
      for (Index l = 0; l < M; ++l) {
        if (used_est[l]) continue;
        if (bk < 0 || err(k, l) < best) {
          best = err(k, l);
          bk = k;
          bl = l;
        }
      }
    }
    used_src[bk] = true;
    used_est[bl] = true;
    res.pairing[bk] = bl;
    res.per_pair.push_back({bk, bl, best, to_db(best)});
    total += best;
  }
  res.average = total / static_cast<double>(pairs);
  res.average_db = to_db(res.average);
  return res;
}

/// Second-order circularity measure |E{s^2}| / E{|s|^2} in [0, 1].
template <RegimeScalar S>
double circularity_ratio(const Vector<S>& s) {
  double power = 0.0;
  S pseudo{};
  for (Index t = 0; t < s.size(); ++t) {
    power += Eigen::numext::abs2(s[t]);
    pseudo += s[t] * s[t];
  }
  if (power <= 0.0) throw DegenerateContrast("circularity_ratio: zero power sequence");
  return std::abs(pseudo) / power;
}

/// Analytic operation counts. These are the published per-iteration cost
/// formulas, an accounting model rather than a hardware counter.
struct FlopLedger {
  std::int64_t per_iteration = 0;
  std::vector<std::int64_t> per_source;
  std::int64_t surcharge = 0;  // prewhitening and/or pseudo-covariance
  std::int64_t total = 0;
};

std::int64_t flops_per_iteration(Algorithm alg, bool complex_regime, Index L, Index T);
std::int64_t prewhitening_flops(bool complex_regime, Index K, Index T);
std::int64_t pseudo_covariance_flops(Index L, Index T);

FlopLedger flops_for(Algorithm alg, bool complex_regime, Index L, Index T,
                     std::span<const int> iterations_per_source, bool prewhitened, Index K);

}  // namespace rica
