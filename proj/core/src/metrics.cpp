#include "rica/metrics.hpp"

#include "rica/errors.hpp"

namespace rica {

std::int64_t flops_per_iteration(Algorithm alg, bool complex_regime, Index L, Index T) {
  switch (alg) {
    case Algorithm::robustica:
      return (complex_regime ? 18 * L + 22 : 5 * L + 12) * T;
    case Algorithm::fastica:
    case Algorithm::nc_fastica:
      return (complex_regime ? 8 * L + 4 : 2 * L + 2) * T;
    case Algorithm::km_fixed_point:
      return (14 * L + 5) * T;
  }
  throw ConfigError("flops_per_iteration: unknown algorithm");
}

std::int64_t prewhitening_flops(bool complex_regime, Index K, Index T) {
  return (complex_regime ? 8 : 2) * K * K * T;
}

std::int64_t pseudo_covariance_flops(Index L, Index T) {
  return L * (2 * L + 1) * T;
}

FlopLedger flops_for(Algorithm alg, bool complex_regime, Index L, Index T,
                     std::span<const int> iterations_per_source, bool prewhitened, Index K) {
  FlopLedger ledger;
  ledger.per_iteration = flops_per_iteration(alg, complex_regime, L, T);
  for (int iters : iterations_per_source) {
    ledger.per_source.push_back(ledger.per_iteration * iters);
  }
  if (prewhitened) ledger.surcharge += prewhitening_flops(complex_regime, K, T);
  if (alg == Algorithm::nc_fastica) ledger.surcharge += pseudo_covariance_flops(L, T);
  ledger.total = ledger.surcharge;
  for (std::int64_t f : ledger.per_source) ledger.total += f;
  return ledger;
}

const char* to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::robustica: return "robustica";
    case Algorithm::fastica: return "fastica";
    case Algorithm::nc_fastica: return "nc-fastica";
    case Algorithm::km_fixed_point: return "kmf";
  }
  return "?";
}

const char* to_string(DeflationMode m) noexcept {
  switch (m) {
    case DeflationMode::orthogonalization: return "ortho";
    case DeflationMode::regression: return "regression";
  }
  return "?";
}

const char* to_string(KurtosisSign k) noexcept {
  switch (k) {
    case KurtosisSign::any: return "any";
    case KurtosisSign::positive: return "+";
    case KurtosisSign::negative: return "-";
  }
  return "?";
}

}  // namespace rica
