#include "rica/quartic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rica/errors.hpp"

namespace rica {
namespace {

// Coefficients can vanish at symmetric points of the search, so the solver
// demotes the degree instead of dividing by a tiny leading coefficient.
constexpr double kDemoteRel = 1e-12;
constexpr double kDedupAbs = 1e-10;

double eval(const double* c, int deg, double x) noexcept {
  double v = c[deg];
  for (int k = deg - 1; k >= 0; --k) v = v * x + c[k];
  return v;
}

cplx eval(const double* c, int deg, cplx x) noexcept {
  cplx v = c[deg];
  for (int k = deg - 1; k >= 0; --k) v = v * x + c[k];
  return v;
}

cplx eval_deriv(const double* c, int deg, cplx x) noexcept {
  cplx v = static_cast<double>(deg) * c[deg];
  for (int k = deg - 1; k >= 1; --k) v = v * x + static_cast<double>(k) * c[k];
  return v;
}

// Ferrari loses a few digits in floating point; one Newton step per root
// restores them. Applied to conjugate pairs it preserves the pairing
// bit-exactly because the coefficients are real.
cplx polish(const double* c, int deg, cplx z) noexcept {
  const cplx d = eval_deriv(c, deg, z);
  if (std::abs(d) < 1e-30) return z;
  const cplx z1 = z - eval(c, deg, z) / d;
  return std::abs(eval(c, deg, z1)) <= std::abs(eval(c, deg, z)) ? z1 : z;
}

std::array<cplx, 2> quadratic_roots(double a, double b, double d) {
  // a z^2 + b z + d, a != 0
  const double disc = b * b - 4.0 * a * d;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? s : -s));
    // q == 0 only when b == 0 and disc == 0
    const double r0 = (q != 0.0) ? q / a : 0.0;
    const double r1 = (q != 0.0) ? d / q : 0.0;
    return {cplx(r0, 0.0), cplx(r1, 0.0)};
  }
  const double re = -b / (2.0 * a);
  const double im = std::sqrt(-disc) / (2.0 * a);
  return {cplx(re, im), cplx(re, -im)};
}

// All real roots of a monic-normalizable real cubic (1 or 3 of them).
std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0) {
  const double a = c2 / c3;
  const double b = c1 / c3;
  const double c = c0 / c3;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double shift = -a / 3.0;
  const double disc = 0.25 * q * q + p * p * p / 27.0;

  std::vector<double> out;
  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    const double u = std::cbrt(-0.5 * q + s);
    const double v = std::cbrt(-0.5 * q - s);
    out.push_back(u + v + shift);
  } else if (p == 0.0) {
    out.push_back(std::cbrt(-q) + shift);
  } else {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double th = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      out.push_back(m * std::cos(th - 2.0 * std::numbers::pi * k / 3.0) + shift);
    }
  }
  return out;
}

std::vector<cplx> cubic_roots(double c3, double c2, double c1, double c0) {
  const double a = c2 / c3;
  const double b = c1 / c3;
  const double c = c0 / c3;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double shift = -a / 3.0;
  const double disc = 0.25 * q * q + p * p * p / 27.0;

  std::vector<cplx> out;
  if (disc > 0.0) {
    // one real root, one conjugate pair obtained by deflation
    const double s = std::sqrt(disc);
    const double t1 = std::cbrt(-0.5 * q + s) + std::cbrt(-0.5 * q - s);
    auto pair = quadratic_roots(1.0, t1, p + t1 * t1);
    out.push_back(cplx(t1 + shift, 0.0));
    out.push_back(pair[0] + shift);
    out.push_back(pair[1] + shift);
  } else {
    for (double r : real_cubic_roots(c3, c2, c1, c0)) out.push_back(cplx(r, 0.0));
    while (out.size() < 3) out.push_back(out.back());  // triple/double root fallback
  }
  return out;
}

std::vector<cplx> quartic_roots(double c4, double c3, double c2, double c1, double c0) {
  const double a3 = c3 / c4;
  const double a2 = c2 / c4;
  const double a1 = c1 / c4;
  const double a0 = c0 / c4;

  // depress: z = t - a3/4
  const double p = a2 - 3.0 * a3 * a3 / 8.0;
  const double q = a1 - 0.5 * a3 * a2 + a3 * a3 * a3 / 8.0;
  const double r =
      a0 - 0.25 * a3 * a1 + a3 * a3 * a2 / 16.0 - 3.0 * a3 * a3 * a3 * a3 / 256.0;
  const double shift = -a3 / 4.0;

  const double scale = std::max({1.0, std::abs(p), std::abs(q), std::abs(r)});
  std::vector<cplx> t_roots;
  if (std::abs(q) <= 1e-14 * scale) {
    // biquadratic: u^2 + p u + r with u = t^2
    auto us = quadratic_roots(1.0, p, r);
    for (const cplx& u : us) {
      const cplx s = std::sqrt(u);
      t_roots.push_back(s);
      t_roots.push_back(-s);
    }
  } else {
    // resolvent in m = alpha^2: m^3 + 2p m^2 + (p^2 - 4r) m - q^2 = 0
    auto ms = real_cubic_roots(1.0, 2.0 * p, p * p - 4.0 * r, -q * q);
    double m = *std::max_element(ms.begin(), ms.end());
    m = std::max(m, 1e-300);
    const double alpha = std::sqrt(m);
    const double beta = 0.5 * (p + m - q / alpha);
    const double gamma = 0.5 * (p + m + q / alpha);
    auto r01 = quadratic_roots(1.0, alpha, beta);
    auto r23 = quadratic_roots(1.0, -alpha, gamma);
    t_roots = {r01[0], r01[1], r23[0], r23[1]};
  }

  for (cplx& t : t_roots) t += shift;
  return t_roots;
}

}  // namespace

RootSet solve(const Quartic& q) {
  double amax = 0.0;
  for (double v : q.c) amax = std::max(amax, std::abs(v));
  if (amax == 0.0) throw PolynomialError("quartic solve: all coefficients are zero");

  int deg = 4;
  while (deg >= 1 && std::abs(q.c[deg]) <= kDemoteRel * amax) --deg;

  RootSet rs;
  if (deg == 0) return rs;  // constant polynomial: no step-size candidates

  switch (deg) {
    case 1:
      rs.roots = {cplx(-q.c[0] / q.c[1], 0.0)};
      break;
    case 2: {
      auto r = quadratic_roots(q.c[2], q.c[1], q.c[0]);
      rs.roots = {r[0], r[1]};
      break;
    }
    case 3:
      rs.roots = cubic_roots(q.c[3], q.c[2], q.c[1], q.c[0]);
      break;
    default:
      rs.roots = quartic_roots(q.c[4], q.c[3], q.c[2], q.c[1], q.c[0]);
      break;
  }

  for (cplx& z : rs.roots) z = polish(q.c.data(), deg, z);

  // conjugate pairs share a real part; evaluating the contrast twice there
  // would be wasted work
  std::vector<double> re;
  re.reserve(rs.roots.size());
  for (const cplx& z : rs.roots) re.push_back(z.real());
  std::sort(re.begin(), re.end());
  for (double v : re) {
    if (rs.real_candidates.empty() || std::abs(v - rs.real_candidates.back()) > kDedupAbs) {
      rs.real_candidates.push_back(v);
    }
  }
  return rs;
}

}  // namespace rica
