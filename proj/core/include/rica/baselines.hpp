#pragma once

#include "rica/contrast.hpp"
#include "rica/robustica.hpp"
#include "rica/signal.hpp"

namespace rica {

/// Kurtosis-based fixed-step / fixed-point update rules used as baselines.
/// All of them assume prewhitened observations; the runner below enforces
/// nothing about the data itself, the caller does (see extract_all).
enum class BaselineKind { fastica_real, fastica_complex_circular, nc_fastica, km_fixed_point };

inline BaselineKind baseline_kind(Algorithm alg, bool complex_regime) {
  switch (alg) {
    case Algorithm::fastica:
      return complex_regime ? BaselineKind::fastica_complex_circular : BaselineKind::fastica_real;
    case Algorithm::nc_fastica: return BaselineKind::nc_fastica;
    case Algorithm::km_fixed_point: return BaselineKind::km_fixed_point;
    default: throw ConfigError("baseline_kind: not a baseline algorithm");
  }
}

/// Sample pseudo-covariance E{x x^T} (no conjugation), computed once per
/// block for the non-circular update rule.
template <RegimeScalar S>
Matrix<S> pseudo_covariance(const SignalBlock<S>& x) {
  return x.data() * x.data().transpose() / static_cast<double>(x.samples());
}

/// w+ = w - (1/3) E{x (w^T x)^3}; real regime only, prewhitened data.
inline Vector<double> fastica_real_step(const Vector<double>& w, const SignalBlock<double>& x) {
  const Vector<double> y = extractor_output(w, x);
  const Vector<double> y3 = y.array().cube();
  return w - (x.data() * y3) / (3.0 * static_cast<double>(x.samples()));
}

/// w+ = w - (1/2) E{x y* |y|^2}; valid for second-order circular sources.
template <RegimeScalar S>
Vector<S> fastica_complex_step(const Vector<S>& w, const SignalBlock<S>& x) {
  const Vector<S> y = extractor_output(w, x);
  Vector<S> u(y.size());
  for (Index t = 0; t < y.size(); ++t) {
    u[t] = Eigen::numext::conj(y[t]) * Eigen::numext::abs2(y[t]);
  }
  return w - (x.data() * u) / (2.0 * static_cast<double>(x.samples()));
}

/// Non-circular variant: w+ = w - (1/2) E{|y|^2 y* x} + (1/2) E{xx^T} E{y*^2} w*.
template <RegimeScalar S>
Vector<S> nc_fastica_step(const Vector<S>& w, const SignalBlock<S>& x,
                          const Matrix<S>& pseudo_cov) {
  const Vector<S> y = extractor_output(w, x);
  const Index n = y.size();
  Vector<S> u(n);
  S pseudo{};
  for (Index t = 0; t < n; ++t) {
    u[t] = Eigen::numext::conj(y[t]) * Eigen::numext::abs2(y[t]);
    pseudo += y[t] * y[t];
  }
  pseudo /= static_cast<double>(n);
  return w - (x.data() * u) / (2.0 * static_cast<double>(n)) +
         0.5 * (pseudo_cov * (Eigen::numext::conj(pseudo) * w.conjugate()));
}

/// Fixed-point rule that assigns the cumulant gradient to the extractor:
/// w+ = E{|y|^2 y* x} - 2 E{|y|^2} E{y* x} - E{y*^2} E{y x}.
template <RegimeScalar S>
Vector<S> km_fixed_point_step(const Vector<S>& w, const SignalBlock<S>& x) {
  const Vector<S> y = extractor_output(w, x);
  const Index n = y.size();
  Vector<S> u(n);
  double power = 0.0;
  S pseudo{};
  for (Index t = 0; t < n; ++t) {
    u[t] = Eigen::numext::conj(y[t]) * Eigen::numext::abs2(y[t]);
    power += Eigen::numext::abs2(y[t]);
    pseudo += y[t] * y[t];
  }
  const double inv = 1.0 / static_cast<double>(n);
  power *= inv;
  pseudo *= inv;
  const Vector<S> e_ysx = x.data() * y.conjugate() * inv;
  const Vector<S> e_yx = x.data() * y * inv;
  return Vector<S>(x.data() * u * inv - 2.0 * power * e_ysx -
                   Eigen::numext::conj(pseudo) * e_yx);
}

/// Runs one baseline to convergence with deflationary orthogonalization
/// against ortho_span, normalization, and the same stopping rule and
/// iteration-count semantics as extract_one.
template <RegimeScalar S>
ExtractionReport<S> baseline_extract_one(BaselineKind kind, const SignalBlock<S>& x,
                                         const Vector<S>& w0, const ExtractionConfig& cfg,
                                         const Matrix<S>* ortho_span = nullptr,
                                         const Matrix<S>* pseudo_cov = nullptr) {
  if constexpr (is_complex_v<S>) {
    if (kind == BaselineKind::fastica_real) {
      throw ConfigError("fastica_real only accepts real-regime blocks");
    }
  }
  if (kind == BaselineKind::nc_fastica && pseudo_cov == nullptr) {
    throw ConfigError("nc_fastica requires the block pseudo-covariance");
  }
  if (w0.norm() == 0.0) throw DegenerateDirection("baseline: zero initial vector");

  const double eps = cfg.stop_threshold(x.samples());
  Vector<S> w = w0;
  detail::project_out(w, ortho_span);
  if (w.norm() < 1e-12) {
    throw DegenerateDirection("baseline: initial vector lies in the deflation span");
  }
  w.normalize();

  ExtractionReport<S> rep;
  rep.stop_reason = StopReason::max_iterations;
  int moves = 0;

  for (int pass = 0; pass < cfg.max_iterations; ++pass) {
    Vector<S> w_plus;
    if constexpr (is_complex_v<S>) {
      switch (kind) {
        case BaselineKind::fastica_complex_circular: w_plus = fastica_complex_step(w, x); break;
        case BaselineKind::nc_fastica: w_plus = nc_fastica_step(w, x, *pseudo_cov); break;
        case BaselineKind::km_fixed_point: w_plus = km_fixed_point_step(w, x); break;
        default: throw ConfigError("unsupported baseline for complex blocks");
      }
    } else {
      switch (kind) {
        case BaselineKind::fastica_real: w_plus = fastica_real_step(w, x); break;
        case BaselineKind::fastica_complex_circular: w_plus = fastica_complex_step(w, x); break;
        case BaselineKind::nc_fastica: w_plus = nc_fastica_step(w, x, *pseudo_cov); break;
        case BaselineKind::km_fixed_point: w_plus = km_fixed_point_step(w, x); break;
      }
    }
    detail::project_out(w_plus, ortho_span);
    const double n = w_plus.norm();
    if (n < 1e-12) {
      rep.stop_reason = StopReason::degenerate;
      break;
    }
    w_plus /= n;

    const S overlap = w.dot(w_plus);
    const bool converged = std::abs(1.0 - std::abs(overlap)) < eps;
    w = w_plus;
    rep.mu_trajectory.push_back(0.0);  // fixed-step rules have no line search
    rep.contrast_trajectory.push_back(sample_kurtosis(extractor_output(w, x)));
    if (converged) {
      rep.stop_reason = StopReason::converged;
      break;
    }
    ++moves;
  }

  rep.final_w = w;
  rep.iterations = std::max(1, moves);
  const Algorithm alg = (kind == BaselineKind::nc_fastica)     ? Algorithm::nc_fastica
                        : (kind == BaselineKind::km_fixed_point) ? Algorithm::km_fixed_point
                                                                 : Algorithm::fastica;
  rep.flops = flops_per_iteration(alg, is_complex_v<S>, x.channels(), x.samples()) *
              rep.iterations;
  if (cfg.target != KurtosisSign::any && !rep.contrast_trajectory.empty()) {
    const double want = (cfg.target == KurtosisSign::positive) ? 1.0 : -1.0;
    rep.sign_mismatch = (rep.contrast_trajectory.back() * want <= 0.0);
  }
  return rep;
}

}  // namespace rica
