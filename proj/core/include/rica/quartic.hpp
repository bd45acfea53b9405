#pragma once

#include <array>
#include <vector>

#include "rica/types.hpp"

namespace rica {

/// Real-coefficient polynomial of degree <= 4; c[k] multiplies mu^k.
struct Quartic {
  std::array<double, 5> c{};

  double operator()(double mu) const noexcept {
    return ((((c[4] * mu + c[3]) * mu + c[2]) * mu + c[1]) * mu) + c[0];
  }
  cplx operator()(cplx mu) const noexcept {
    return ((((c[4] * mu + c[3]) * mu + c[2]) * mu + c[1]) * mu) + c[0];
  }
};

/// All complex roots of the (effective-degree) polynomial plus the real
/// parts of the roots, deduplicated, which are the step-size candidates.
struct RootSet {
  std::vector<cplx> roots;
  std::vector<double> real_candidates;

  /// True when the polynomial demoted to degree 0: no candidates exist.
  bool empty() const noexcept { return roots.empty(); }
};

/// Closed-form rooting (Ferrari / Cardano / quadratic formula, chosen by the
/// effective degree after a relative leading-coefficient test) followed by
/// one Newton correction per root. Throws PolynomialError when every
/// coefficient is zero; returns an empty RootSet for effective degree 0.
RootSet solve(const Quartic& q);

}  // namespace rica
