#pragma once

#include <stdexcept>
#include <string>

namespace rica {

/// Shape mismatch between operands; message names expected and actual shapes.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Extractor output has (numerically) zero power, so the kurtosis contrast
/// and its gradient are undefined.
struct DegenerateContrast : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Candidate extracting vector lies entirely inside the span of previously
/// found vectors.
struct DegenerateDirection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Data matrix has lower numerical rank than the requested dimension.
struct RankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration (bad file, bad option combination).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File format or filesystem problem.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Degenerate polynomial input (all coefficients zero).
struct PolynomialError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace rica
