#pragma once

#include <span>
#include <vector>

#include "rica/errors.hpp"
#include "rica/quartic.hpp"
#include "rica/types.hpp"

namespace rica {

/// Sample means of the per-sample sequences a = y^2, b = g^2, c = yg and
/// d = Re(y g*) that enter the step polynomial. |a| = |y|^2 and |b| = |g|^2,
/// so every mean below is real except mean_a, mean_b, mean_c.
template <RegimeScalar S>
struct KurtosisStats {
  S mean_a{}, mean_b{}, mean_c{};
  double mean_abs_a = 0.0;     // E{|a|}  = E{|y|^2}
  double mean_abs_b = 0.0;     // E{|b|}  = E{|g|^2}
  double mean_d = 0.0;         // E{d}
  double mean_abs_a_sq = 0.0;  // E{|a|^2}
  double mean_abs_b_sq = 0.0;  // E{|b|^2}
  double mean_abs_a_d = 0.0;   // E{|a| d}
  double mean_abs_b_d = 0.0;   // E{|b| d}
  double mean_d_sq = 0.0;      // E{d^2}
  double mean_abs_ab = 0.0;    // E{|a||b|}
};

template <RegimeScalar S>
KurtosisStats<S> kurtosis_stats(const Vector<S>& y, const Vector<S>& g_out) {
  if (y.size() != g_out.size()) {
    throw DimensionError("kurtosis_stats: y and g sequences differ in length");
  }
  KurtosisStats<S> st;
  const Index n = y.size();
  for (Index t = 0; t < n; ++t) {
    const S yt = y[t];
    const S gt = g_out[t];
    const double aa = Eigen::numext::abs2(yt);  // |a| = |y|^2
    const double bb = Eigen::numext::abs2(gt);  // |b| = |g|^2
    const double d = Eigen::numext::real(yt * Eigen::numext::conj(gt));
    st.mean_a += yt * yt;
    st.mean_b += gt * gt;
    st.mean_c += yt * gt;
    st.mean_abs_a += aa;
    st.mean_abs_b += bb;
    st.mean_d += d;
    st.mean_abs_a_sq += aa * aa;
    st.mean_abs_b_sq += bb * bb;
    st.mean_abs_a_d += aa * d;
    st.mean_abs_b_d += bb * d;
    st.mean_d_sq += d * d;
    st.mean_abs_ab += aa * bb;
  }
  const double inv = 1.0 / static_cast<double>(n);
  st.mean_a *= inv;
  st.mean_b *= inv;
  st.mean_c *= inv;
  st.mean_abs_a *= inv;
  st.mean_abs_b *= inv;
  st.mean_d *= inv;
  st.mean_abs_a_sq *= inv;
  st.mean_abs_b_sq *= inv;
  st.mean_abs_a_d *= inv;
  st.mean_abs_b_d *= inv;
  st.mean_d_sq *= inv;
  st.mean_abs_ab *= inv;
  return st;
}

/// The three polynomials governing the contrast along the line w + mu g:
/// K(mu) = P(mu)/Q(mu)^2 - 2 with deg P = 4 and deg Q = 2, and the quartic
/// p = P'Q - 2PQ' whose roots are the step-size candidates.
struct StepPolynomial {
  std::array<double, 5> P{};  // h0..h4
  std::array<double, 3> Q{};  // i0..i2
  Quartic p;

  double p_at(double mu) const noexcept { return p(mu); }

  double q_at(double mu) const noexcept { return (Q[2] * mu + Q[1]) * mu + Q[0]; }

  double P_at(double mu) const noexcept {
    return ((((P[4] * mu + P[3]) * mu + P[2]) * mu + P[1]) * mu) + P[0];
  }

  /// Contrast of the updated extractor output y + mu g.
  double contrast_at(double mu) const noexcept {
    const double q = q_at(mu);
    return P_at(mu) / (q * q) - 2.0;
  }

  /// Guards against evaluating the contrast where the output power
  /// (numerically) vanishes along the line.
  bool q_vanishes_at(double mu) const noexcept {
    const double scale =
        std::abs(Q[0]) + std::abs(Q[1] * mu) + std::abs(Q[2] * mu * mu);
    return std::abs(q_at(mu)) <= 1e-12 * scale || scale < 1e-300;
  }
};

/// Builds the step polynomial for the current extractor output y and search
/// direction output g_out = g^H x. Statistics below T = 5 samples are
/// rank-deficient for a quartic but still defined; no error is raised.
template <RegimeScalar S>
StepPolynomial os_coefficients(const Vector<S>& y, const Vector<S>& g_out) {
  const KurtosisStats<S> st = kurtosis_stats(y, g_out);
  using Eigen::numext::abs2;
  using Eigen::numext::conj;
  using Eigen::numext::real;

  StepPolynomial sp;
  auto& h = sp.P;
  auto& i = sp.Q;
  h[0] = st.mean_abs_a_sq - abs2(st.mean_a);
  h[1] = 4.0 * st.mean_abs_a_d - 4.0 * real(st.mean_a * conj(st.mean_c));
  h[2] = 4.0 * st.mean_d_sq + 2.0 * st.mean_abs_ab - 4.0 * abs2(st.mean_c) -
         2.0 * real(st.mean_a * conj(st.mean_b));
  h[3] = 4.0 * st.mean_abs_b_d - 4.0 * real(st.mean_b * conj(st.mean_c));
  h[4] = st.mean_abs_b_sq - abs2(st.mean_b);
  i[0] = st.mean_abs_a;
  i[1] = 2.0 * st.mean_d;
  i[2] = st.mean_abs_b;

  // p = P'Q - 2PQ' reduced to its quartic coefficients
  sp.p.c[0] = -2.0 * h[0] * i[1] + h[1] * i[0];
  sp.p.c[1] = -4.0 * h[0] * i[2] - h[1] * i[1] + 2.0 * h[2] * i[0];
  sp.p.c[2] = -3.0 * h[1] * i[2] + 3.0 * h[3] * i[0];
  sp.p.c[3] = -2.0 * h[2] * i[2] + h[3] * i[1] + 4.0 * h[4] * i[0];
  sp.p.c[4] = -h[3] * i[2] + 2.0 * h[4] * i[1];
  return sp;
}

struct RootChoice {
  double mu = 0.0;
  double contrast = 0.0;
};

/// Evaluates the contrast at every real candidate plus the mu = 0 guard and
/// returns the argmax of |K| (target any) or of sign * K (targeted mode).
/// Ties break toward smaller |mu|, with a small relative deadband so the
/// extractor never moves for gains below the precision of the polynomial
/// evaluation itself. Candidates where Q vanishes are discarded; if even
/// the guard is unusable the contrast is degenerate.
inline RootChoice select_root(const StepPolynomial& sp, std::span<const double> candidates,
                              KurtosisSign target = KurtosisSign::any) {
  std::vector<double> mus(candidates.begin(), candidates.end());
  mus.push_back(0.0);
  std::sort(mus.begin(), mus.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });

  const double sign = (target == KurtosisSign::negative) ? -1.0 : 1.0;
  bool found = false;
  RootChoice best;
  double best_score = 0.0;
  for (double mu : mus) {
    if (sp.q_vanishes_at(mu)) continue;
    const double k = sp.contrast_at(mu);
    const double score = (target == KurtosisSign::any) ? std::abs(k) : sign * k;
    if (!found || score > best_score + 1e-9 * (1.0 + std::abs(best_score))) {
      found = true;
      best_score = score;
      best = {mu, k};
    }
  }
  if (!found) {
    throw DegenerateContrast("select_root: output power vanishes at every candidate");
  }
  return best;
}

}  // namespace rica
