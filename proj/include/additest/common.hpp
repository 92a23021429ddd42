#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace additest {

inline constexpr const char* kVersion = "0.1.0";

/// A symmetric factorization hit a pivot below tolerance; carries the
/// index of the offending pivot so callers can report which coordinate
/// of the covariance degenerated.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, std::size_t pivot_index,
                      double pivot_value)
      : std::runtime_error(what),
        pivot_index_(pivot_index),
        pivot_value_(pivot_value) {}

  std::size_t pivot_index() const { return pivot_index_; }
  double pivot_value() const { return pivot_value_; }

 private:
  std::size_t pivot_index_;
  double pivot_value_;
};

/// Rank deficiency detected where full rank was required (orthonormalization,
/// regression design, contrast-row selection).
class RankError : public std::runtime_error {
 public:
  explicit RankError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid run configuration (sizes that do not fit the training set,
/// incompatible grid shapes, out-of-range projection dimensions, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace additest
