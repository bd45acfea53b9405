#pragma once

#include "rica/errors.hpp"
#include "rica/signal.hpp"
#include "rica/types.hpp"

namespace rica {

// No epsilon-regularization of the contrast denominator: a silently
// regularized degenerate case would mask real failures.
inline constexpr double kDegeneratePower = 1e-300;

/// Raw sample moments of an extractor output plus the kurtosis they define.
template <RegimeScalar S>
struct ContrastValue {
  double kurtosis = 0.0;  // (abs4 - 2 power^2 - |pseudo_power|^2) / power^2
  double moment4 = 0.0;   // E{|y|^4}, the fourth-order moment criterion
  double power = 0.0;     // E{|y|^2}
  S pseudo_power{};       // E{y^2}
  double abs4 = 0.0;      // E{|y|^4}
};

namespace detail {

template <RegimeScalar S>
struct YMoments {
  double power = 0.0;
  double abs4 = 0.0;
  S pseudo{};
};

template <RegimeScalar S>
YMoments<S> y_moments(const Vector<S>& y) {
  YMoments<S> m;
  const Index n = y.size();
  for (Index t = 0; t < n; ++t) {
    const double a2 = Eigen::numext::abs2(y[t]);
    m.power += a2;
    m.abs4 += a2 * a2;
    m.pseudo += y[t] * y[t];
  }
  const double inv = 1.0 / static_cast<double>(n);
  m.power *= inv;
  m.abs4 *= inv;
  m.pseudo *= inv;
  return m;
}

template <RegimeScalar S>
ContrastValue<S> contrast_from_moments(const YMoments<S>& m) {
  if (m.power < kDegeneratePower) {
    throw DegenerateContrast("kurtosis: extractor output power is zero");
  }
  ContrastValue<S> c;
  c.power = m.power;
  c.abs4 = m.abs4;
  c.moment4 = m.abs4;
  c.pseudo_power = m.pseudo;
  c.kurtosis =
      (m.abs4 - 2.0 * m.power * m.power - Eigen::numext::abs2(m.pseudo)) / (m.power * m.power);
  return c;
}

// Gradient from precomputed y and its moments. Brandwood convention
// grad_w = grad_{w_r} + j grad_{w_i}; the real regime is the same formula
// with vanishing imaginary parts.
template <RegimeScalar S>
Vector<S> kurtosis_gradient_impl(const Matrix<S>& X, const Vector<S>& y, const YMoments<S>& m) {
  if (m.power < kDegeneratePower) {
    throw DegenerateContrast("kurtosis_gradient: extractor output power is zero");
  }
  const Index n = y.size();
  Vector<S> y2ys(n);
  for (Index t = 0; t < n; ++t) {
    y2ys[t] = Eigen::numext::conj(y[t]) * Eigen::numext::abs2(y[t]);
  }
  const double inv = 1.0 / static_cast<double>(n);
  const Vector<S> e_y2ysx = X * y2ys * inv;             // E{|y|^2 y* x}
  const Vector<S> e_yx = X * y * inv;                   // E{y x}
  const Vector<S> e_ysx = X * y.conjugate() * inv;      // E{y* x}
  const S pseudo_conj = Eigen::numext::conj(m.pseudo);  // E{y*^2}
  const double c = m.abs4 - Eigen::numext::abs2(m.pseudo);
  return (4.0 / (m.power * m.power)) * (e_y2ysx - e_yx * pseudo_conj - (c / m.power) * e_ysx);
}

}  // namespace detail

/// Normalized fourth-order marginal cumulant of y = w^H x, from sample
/// means. Scale-invariant in w. Throws DegenerateContrast when the output
/// power vanishes.
template <RegimeScalar S>
ContrastValue<S> kurtosis(const Vector<S>& w, const SignalBlock<S>& x) {
  const Vector<S> y = extractor_output(w, x);
  return detail::contrast_from_moments(detail::y_moments(y));
}

/// Sample kurtosis of an already-extracted sequence.
template <RegimeScalar S>
double sample_kurtosis(const Vector<S>& y) {
  return detail::contrast_from_moments(detail::y_moments(y)).kurtosis;
}

/// Fourth-order moment criterion E{|y|^4}.
template <RegimeScalar S>
double moment4(const Vector<S>& w, const SignalBlock<S>& x) {
  const Vector<S> y = extractor_output(w, x);
  double acc = 0.0;
  for (Index t = 0; t < y.size(); ++t) {
    const double a2 = Eigen::numext::abs2(y[t]);
    acc += a2 * a2;
  }
  return acc / static_cast<double>(y.size());
}

/// Gradient of the kurtosis contrast with respect to w.
template <RegimeScalar S>
Vector<S> kurtosis_gradient(const Vector<S>& w, const SignalBlock<S>& x) {
  const Vector<S> y = extractor_output(w, x);
  return detail::kurtosis_gradient_impl(x.data(), y, detail::y_moments(y));
}

/// Gradient of the fourth-order moment criterion: 4 E{x y* |y|^2}, which in
/// the real regime reduces to 4 E{x (w^T x)^3}.
template <RegimeScalar S>
Vector<S> moment4_gradient(const Vector<S>& w, const SignalBlock<S>& x) {
  const Vector<S> y = extractor_output(w, x);
  const Index n = y.size();
  Vector<S> u(n);
  for (Index t = 0; t < n; ++t) {
    u[t] = Eigen::numext::conj(y[t]) * Eigen::numext::abs2(y[t]);
  }
  return 4.0 * (x.data() * u) / static_cast<double>(n);
}

/// Contrast and gradient from one pass over the block.
template <RegimeScalar S>
struct ContrastGradient {
  ContrastValue<S> value;
  Vector<S> gradient;
};

template <RegimeScalar S>
ContrastGradient<S> kurtosis_with_gradient(const Vector<S>& w, const SignalBlock<S>& x) {
  const Vector<S> y = extractor_output(w, x);
  const auto m = detail::y_moments(y);
  return {detail::contrast_from_moments(m), detail::kurtosis_gradient_impl(x.data(), y, m)};
}

}  // namespace rica
