#pragma once

#include <stdexcept>
#include <string>

namespace tumatch {

// Shape mismatch between inputs.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Value outside its admissible range.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Input larger than an operation supports.
struct SizeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Individuals duplicated or unaccounted for.
struct ConsistencyError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A statistic was requested of an empty distribution.
struct EmptyDistributionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A cell that must be strictly positive is zero. Indices are 1-based as in
// all I/O; 0 denotes the singles slot of that side.
struct ZeroCellError : std::runtime_error {
  ZeroCellError(int x_, int y_, const std::string& what)
      : std::runtime_error(what), x(x_), y(y_) {}
  int x;
  int y;
};

// Iterative solve did not reach tolerance; carries the last residual.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double residual_)
      : std::runtime_error(what), residual(residual_) {}
  double residual;
};

// Design matrix rank-deficient.
struct RankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Weight or covariance matrix too ill-conditioned to invert.
struct ConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Configuration problem; key_path points at the offending entry ("/r2").
struct ConfigError : std::runtime_error {
  ConfigError(std::string key_path_, const std::string& what)
      : std::runtime_error("config error at " + key_path_ + ": " + what),
        key_path(std::move(key_path_)) {}
  std::string key_path;
};

}  // namespace tumatch
