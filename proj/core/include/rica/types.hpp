#pragma once

#include <complex>
#include <concepts>

#include <Eigen/Dense>

namespace rica {

using cplx = std::complex<double>;

template <typename T> struct is_complex : std::false_type {};
template <typename T> struct is_complex<std::complex<T>> : std::true_type {};
template <typename T> inline constexpr bool is_complex_v = is_complex<T>::value;

/// The two scalar regimes supported throughout the library. All algorithm
/// code is generic over this choice; the real regime is the complex code
/// path with identically zero imaginary parts.
template <typename T>
concept RegimeScalar = std::same_as<T, double> || std::same_as<T, cplx>;

template <RegimeScalar S> using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <RegimeScalar S> using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

enum class Regime { real, complex_valued };

template <RegimeScalar S>
constexpr Regime regime_of() noexcept {
  return is_complex_v<S> ? Regime::complex_valued : Regime::real;
}

/// Which extraction engine drives the per-source search.
enum class Algorithm { robustica, fastica, nc_fastica, km_fixed_point };

/// How previously extracted sources are removed from the problem.
enum class DeflationMode { orthogonalization, regression };

/// Kurtosis-sign targeting for the root selection step.
enum class KurtosisSign { any, positive, negative };

const char* to_string(Algorithm a) noexcept;
const char* to_string(DeflationMode m) noexcept;
const char* to_string(KurtosisSign k) noexcept;

}  // namespace rica
