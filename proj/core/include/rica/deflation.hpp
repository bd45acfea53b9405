#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rica/baselines.hpp"
#include "rica/metrics.hpp"
#include "rica/robustica.hpp"
#include "rica/rng.hpp"
#include "rica/signal.hpp"

namespace rica {

/// Whitening transform obtained from the economy SVD of the data matrix.
/// transform maps observations to K coordinates with identity sample
/// covariance; reverse maps back.
template <RegimeScalar S>
struct Prewhitener {
  Matrix<S> transform;  // K x L
  Matrix<S> reverse;    // L x K
  Index retained_dimension = 0;
  std::int64_t flops = 0;  // 2 K^2 T real / 8 K^2 T complex
};

template <RegimeScalar S>
std::pair<Prewhitener<S>, SignalBlock<S>> prewhiten(const SignalBlock<S>& x, Index k) {
  const Index L = x.channels();
  const Index T = x.samples();
  if (k < 1 || k > L) {
    throw DimensionError("prewhiten: target dimension " + std::to_string(k) +
                         " outside [1, " + std::to_string(L) + "]");
  }
  Eigen::JacobiSVD<Matrix<S>> svd(x.data(), Eigen::ComputeThinU);
  const Eigen::VectorXd sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > sv[0] * 1e-12) ++rank;
  }
  if (rank < k) {
    throw RankError("prewhiten: numerical rank " + std::to_string(rank) +
                    " is below requested dimension " + std::to_string(k));
  }

  const double sqrt_t = std::sqrt(static_cast<double>(T));
  const Matrix<S> U = svd.matrixU().leftCols(k);
  Prewhitener<S> pw;
  pw.retained_dimension = k;
  pw.transform =
      (sqrt_t * sv.head(k).cwiseInverse()).template cast<S>().asDiagonal() * U.adjoint();
  pw.reverse = U * (sv.head(k) / sqrt_t).template cast<S>().asDiagonal();
  pw.flops = prewhitening_flops(is_complex_v<S>, k, T);
  return {pw, SignalBlock<S>(pw.transform * x.data())};
}

/// Gram-Schmidt projection w+ <- w+ - W W^H w+ against the orthonormal
/// columns of span. Normalization is the caller's step. Throws when the
/// input lies entirely inside the span.
template <RegimeScalar S>
Vector<S> orthogonalize(const Vector<S>& w_plus, const Matrix<S>& span) {
  if (span.cols() == 0) return w_plus;
  Vector<S> out = w_plus - span * (span.adjoint() * w_plus);
  if (out.norm() < 1e-12) {
    throw DegenerateDirection("orthogonalize: vector lies in the span of previous extractors");
  }
  return out;
}

template <RegimeScalar S>
struct RegressionDeflation {
  Vector<S> h_hat;        // MMSE regression coefficient per channel
  SignalBlock<S> residual;
};

/// Removes the contribution of the estimated source from the block:
/// h = E{x s*}/E{|s|^2}, x <- x - h s. The residual is sample-uncorrelated
/// with the estimate.
template <RegimeScalar S>
RegressionDeflation<S> regress_deflate(const SignalBlock<S>& x, const Vector<S>& s_hat) {
  if (s_hat.size() != x.samples()) {
    throw DimensionError("regress_deflate: estimate length " + std::to_string(s_hat.size()) +
                         " vs block samples " + std::to_string(x.samples()));
  }
  const double power = s_hat.squaredNorm() / static_cast<double>(s_hat.size());
  if (power < kDegeneratePower) {
    throw DegenerateContrast("regress_deflate: zero-power source estimate");
  }
  const Vector<S> h =
      x.data() * s_hat.conjugate() / (static_cast<double>(x.samples()) * power);
  Matrix<S> res = x.data() - h * s_hat.transpose();
  return {h, SignalBlock<S>(std::move(res))};
}

struct SeparationOptions {
  Algorithm algorithm = Algorithm::robustica;
  DeflationMode deflation = DeflationMode::regression;
  bool prewhiten = false;
  /// Baselines are only defined over white data. Running one without the
  /// explicit prewhitening step is a configuration error unless the caller
  /// attests that the block is white by construction (e.g. a noiseless
  /// orthonormal mixture of unit-power sources).
  bool assume_white = false;
  /// 0 means extract as many sources as the (possibly whitened) block has
  /// channels.
  Index num_sources = 0;
  /// Per-source kurtosis-sign targets; missing entries fall back to the
  /// ExtractionConfig target.
  std::vector<KurtosisSign> sign_schedule;
};

template <RegimeScalar S>
struct SeparationResult {
  std::vector<ExtractionReport<S>> reports;
  SignalBlock<S> estimates;   // one row per extracted source
  Matrix<S> mixing_estimate;  // L x K, column k regresses x on estimate k
  std::int64_t surcharge_flops = 0;
  std::int64_t total_flops = 0;
};

namespace detail {

template <RegimeScalar S>
Vector<S> initial_vector(InitPolicy policy, Index dim, Index k, std::uint64_t seed) {
  Vector<S> w0 = Vector<S>::Zero(dim);
  if (policy == InitPolicy::canonical_basis) {
    w0[k % dim] = S{1.0};
    return w0;
  }
  CounterRng rng(seed, CounterRng::derive(0x77303377ULL, static_cast<std::uint64_t>(k)));
  for (Index i = 0; i < dim; ++i) {
    if constexpr (is_complex_v<S>) {
      w0[i] = rng.circular_normal();
    } else {
      w0[i] = rng.normal();
    }
  }
  w0.normalize();
  return w0;
}

}  // namespace detail

/// Sequential extraction of num_sources components. Baselines run in
/// orthogonalization mode over whitened data only; RobustICA accepts either
/// deflation mode with whitening optional. On a degenerate direction the
/// source is retried from a seeded random initialization (up to 3 times).
template <RegimeScalar S>
SeparationResult<S> extract_all(const SignalBlock<S>& x, const ExtractionConfig& cfg,
                                const SeparationOptions& opt) {
  if (opt.algorithm != Algorithm::robustica) {
    if (opt.deflation != DeflationMode::orthogonalization) {
      throw ConfigError(std::string("extract_all: ") + to_string(opt.algorithm) +
                        " requires orthogonalization deflation");
    }
    if (!opt.prewhiten && !opt.assume_white) {
      throw ConfigError(std::string("extract_all: ") + to_string(opt.algorithm) +
                        " requires prewhitened data (or assume_white for data that is white "
                        "by construction)");
    }
  }

  std::optional<Prewhitener<S>> pw;
  std::optional<SignalBlock<S>> whitened;
  Index dim = x.channels();
  const Index K = opt.num_sources > 0 ? opt.num_sources : dim;
  if (K > dim) {
    throw DimensionError("extract_all: cannot extract " + std::to_string(K) + " sources from " +
                         std::to_string(dim) + " channels");
  }
  if (opt.prewhiten) {
    auto [p, z] = prewhiten(x, K);
    pw = std::move(p);
    whitened = std::move(z);
    dim = K;
  }
  const SignalBlock<S>& working0 = opt.prewhiten ? *whitened : x;

  std::vector<ExtractionReport<S>> reports;
  Matrix<S> estimates(K, x.samples());
  Matrix<S> mixing_estimate(x.channels(), K);
  Matrix<S> span(dim, 0);
  std::optional<SignalBlock<S>> residual;
  if (opt.deflation == DeflationMode::regression) residual = working0;

  std::int64_t surcharge = 0;
  std::optional<Matrix<S>> pcov;
  if (opt.algorithm == Algorithm::nc_fastica) {
    pcov = pseudo_covariance(working0);
    surcharge += pseudo_covariance_flops(dim, x.samples());
  }
  if (pw) surcharge += pw->flops;

  for (Index k = 0; k < K; ++k) {
    ExtractionConfig cfg_k = cfg;
    if (static_cast<std::size_t>(k) < opt.sign_schedule.size()) {
      cfg_k.target = opt.sign_schedule[static_cast<std::size_t>(k)];
    }
    const SignalBlock<S>& block =
        (opt.deflation == DeflationMode::regression) ? *residual : working0;
    const Matrix<S>* span_ptr =
        (opt.deflation == DeflationMode::orthogonalization) ? &span : nullptr;

    ExtractionReport<S> rep;
    bool done = false;
    for (int attempt = 0; attempt < 4 && !done; ++attempt) {
      const Vector<S> w0 =
          (attempt == 0)
              ? detail::initial_vector<S>(cfg.init, dim, k, cfg.rng_seed)
              : detail::initial_vector<S>(InitPolicy::random_unit, dim, k,
                                          CounterRng::derive(cfg.rng_seed, 17u + attempt));
      try {
        if (opt.algorithm == Algorithm::robustica) {
          rep = extract_one(block, w0, cfg_k, span_ptr);
        } else {
          rep = baseline_extract_one(baseline_kind(opt.algorithm, is_complex_v<S>), block, w0,
                                     cfg_k, span_ptr, pcov ? &*pcov : nullptr);
        }
        done = true;
      } catch (const DegenerateDirection&) {
        if (attempt == 3) throw;
      }
    }

    const Vector<S> s_hat = extractor_output(rep.final_w, block);
    estimates.row(k) = s_hat.transpose();
    if (opt.deflation == DeflationMode::orthogonalization) {
      span.conservativeResize(Eigen::NoChange, span.cols() + 1);
      span.col(span.cols() - 1) = rep.final_w;
      // mixing-column estimate relative to the original observations
      const double p = s_hat.squaredNorm() / static_cast<double>(x.samples());
      mixing_estimate.col(k) =
          x.data() * s_hat.conjugate() / (static_cast<double>(x.samples()) * std::max(p, 1e-300));
    } else {
      auto defl = regress_deflate(*residual, s_hat);
      // report the regression column in observation coordinates
      mixing_estimate.col(k) = pw ? Vector<S>(pw->reverse * defl.h_hat) : defl.h_hat;
      residual = std::move(defl.residual);
    }
    reports.push_back(std::move(rep));
  }

  std::int64_t total = surcharge;
  for (const auto& r : reports) total += r.flops;
  return SeparationResult<S>{std::move(reports), SignalBlock<S>(std::move(estimates)),
                             std::move(mixing_estimate), surcharge, total};
}

}  // namespace rica
