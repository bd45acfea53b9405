#pragma once

#include <cstdint>
#include <iostream>
#include <optional>
#include <vector>

#include "rica/contrast.hpp"
#include "rica/metrics.hpp"
#include "rica/signal.hpp"
#include "rica/step_poly.hpp"

namespace rica {

enum class InitPolicy { canonical_basis, random_unit };

struct ExtractionConfig {
  int max_iterations = 1000;
  /// Termination constant of the |1 - |w^H w+|| test; the threshold applied
  /// is eta / T unless epsilon overrides it directly.
  double eta = 0.5e-6;
  std::optional<double> epsilon;
  KurtosisSign target = KurtosisSign::any;
  /// Normalizing the search direction before building the step polynomial
  /// improves the conditioning of the root extraction.
  bool normalize_gradient = true;
  InitPolicy init = InitPolicy::canonical_basis;
  std::uint64_t rng_seed = 1;

  double stop_threshold(Index samples) const {
    const double eps = epsilon ? *epsilon : eta / static_cast<double>(samples);
    if (eps >= 1.0) throw ConfigError("ExtractionConfig: stop threshold must be < 1");
    return eps;
  }
};

enum class StopReason { converged, max_iterations, degenerate };

inline const char* to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::degenerate: return "degenerate";
  }
  return "?";
}

/// Per-source trace of one extraction run. `iterations` counts the updates
/// that moved the extracting vector; the final pass that merely confirms
/// convergence is not counted (a run that converges immediately reports 1).
template <RegimeScalar S>
struct ExtractionReport {
  Vector<S> final_w;
  int iterations = 0;
  std::vector<double> contrast_trajectory;
  std::vector<double> mu_trajectory;
  StopReason stop_reason = StopReason::max_iterations;
  std::int64_t flops = 0;
  bool sign_mismatch = false;
};

namespace detail {

// Gradient components inside span(W) are removed before the line search so
// the whole search line stays feasible; Eq-style post-update projection then
// only clears roundoff. Below this norm the direction carries no usable
// information at unit scale.
inline constexpr double kTinyGradient = 1e-12;

template <RegimeScalar S>
void project_out(Vector<S>& v, const Matrix<S>* span) {
  if (span && span->cols() > 0) v -= (*span) * (span->adjoint() * v);
}

}  // namespace detail

/// Extracts one source by exact line maximization of the absolute kurtosis
/// contrast (or of sign * kurtosis in targeted mode). When ortho_span is
/// given, every iterate is kept orthogonal to its columns.
template <RegimeScalar S>
ExtractionReport<S> extract_one(const SignalBlock<S>& x, const Vector<S>& w0,
                                const ExtractionConfig& cfg,
                                const Matrix<S>* ortho_span = nullptr) {
  if (w0.size() != x.channels()) {
    throw DimensionError("extract_one: w0 has " + std::to_string(w0.size()) +
                         " entries, block has " + std::to_string(x.channels()) + " channels");
  }
  if (w0.norm() == 0.0) throw DegenerateDirection("extract_one: zero initial vector");
  if (x.samples() < 5) {
    // a quartic has five coefficients; the statistics stay defined but are
    // rank-deficient below five samples
    std::cerr << "rica: warning: block has only " << x.samples()
              << " samples; step-polynomial statistics are rank-deficient\n";
  }

  const double eps = cfg.stop_threshold(x.samples());
  Vector<S> w = w0;
  detail::project_out(w, ortho_span);
  if (w.norm() < 1e-12) {
    throw DegenerateDirection("extract_one: initial vector lies in the deflation span");
  }
  w.normalize();

  ExtractionReport<S> rep;
  rep.stop_reason = StopReason::max_iterations;
  int moves = 0;

  const auto score = [&](double k) {
    switch (cfg.target) {
      case KurtosisSign::any: return std::abs(k);
      case KurtosisSign::positive: return k;
      case KurtosisSign::negative: return -k;
    }
    return std::abs(k);
  };

  Vector<S> y = extractor_output(w, x);
  auto moments = detail::y_moments(y);
  for (int pass = 0; pass < cfg.max_iterations; ++pass) {
    if (moments.power < kDegeneratePower) {
      rep.stop_reason = StopReason::degenerate;
      break;
    }
    const double k_cur = detail::contrast_from_moments(moments).kurtosis;
    Vector<S> g = detail::kurtosis_gradient_impl(x.data(), y, moments);
    detail::project_out(g, ortho_span);
    const double gnorm = g.norm();
    if (gnorm < detail::kTinyGradient) {
      // stationary point of the (possibly constrained) contrast
      rep.mu_trajectory.push_back(0.0);
      rep.contrast_trajectory.push_back(k_cur);
      rep.stop_reason = StopReason::converged;
      break;
    }
    if (cfg.normalize_gradient) g /= gnorm;

    const Vector<S> g_out = extractor_output(g, x);
    const StepPolynomial sp = os_coefficients(y, g_out);

    std::vector<double> candidates;
    double pmax = 0.0;
    for (double v : sp.p.c) pmax = std::max(pmax, std::abs(v));
    if (pmax > 0.0) candidates = solve(sp.p).real_candidates;
    // identically zero p (e.g. zero search-direction output) leaves only the
    // mu = 0 guard inside select_root
    const RootChoice rc = select_root(sp, candidates, cfg.target);

    Vector<S> w_plus = w + rc.mu * g;
    detail::project_out(w_plus, ortho_span);
    const double n = w_plus.norm();
    if (n < 1e-12) {
      rep.stop_reason = StopReason::degenerate;
      break;
    }
    w_plus /= n;

    // the mu = 0 guard, applied to the directly evaluated contrast: if the
    // predicted gain was below the precision of the polynomial evaluation,
    // the extractor is converged at working precision and must not move
    Vector<S> y_plus = extractor_output(w_plus, x);
    const auto moments_plus = detail::y_moments(y_plus);
    if (moments_plus.power < kDegeneratePower) {
      rep.stop_reason = StopReason::degenerate;
      break;
    }
    const double k_plus = detail::contrast_from_moments(moments_plus).kurtosis;
    if (score(k_plus) < score(k_cur)) {
      rep.mu_trajectory.push_back(0.0);
      rep.contrast_trajectory.push_back(k_cur);
      rep.stop_reason = StopReason::converged;
      break;
    }

    const S overlap = w.dot(w_plus);  // w^H w+
    const bool converged = std::abs(1.0 - std::abs(overlap)) < eps;
    w = w_plus;
    y = std::move(y_plus);
    moments = moments_plus;
    rep.mu_trajectory.push_back(rc.mu);
    rep.contrast_trajectory.push_back(k_plus);
    if (converged) {
      rep.stop_reason = StopReason::converged;
      break;
    }
    ++moves;
  }

  rep.final_w = w;
  rep.iterations = std::max(1, moves);
  rep.flops =
      flops_per_iteration(Algorithm::robustica, is_complex_v<S>, x.channels(), x.samples()) *
      rep.iterations;
  if (cfg.target != KurtosisSign::any && !rep.contrast_trajectory.empty()) {
    const double k = rep.contrast_trajectory.back();
    const double want = (cfg.target == KurtosisSign::positive) ? 1.0 : -1.0;
    rep.sign_mismatch = (k * want <= 0.0);
  }
  return rep;
}

/// Counts the places where a trajectory violates the guaranteed monotone
/// ascent of |K| (or sign * K in targeted mode) beyond tol.
template <RegimeScalar S>
int monotonicity_violations(const ExtractionReport<S>& rep, KurtosisSign target,
                            double tol = 1e-12) {
  const auto score = [&](double k) {
    switch (target) {
      case KurtosisSign::any: return std::abs(k);
      case KurtosisSign::positive: return k;
      case KurtosisSign::negative: return -k;
    }
    return std::abs(k);
  };
  int violations = 0;
  const auto& tr = rep.contrast_trajectory;
  for (std::size_t i = 1; i < tr.size(); ++i) {
    if (score(tr[i]) < score(tr[i - 1]) - tol) ++violations;
  }
  return violations;
}

}  // namespace rica
