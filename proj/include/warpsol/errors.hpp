#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace warpsol {

/// Malformed expression text. `position` is the 0-based character offset.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// log / fractional power of a non-positive value, or division by zero.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model description that violates its invariants (dimension bookkeeping,
/// catalog constraints, non-positive warps, bad configuration).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integration failure: step underflow or the state leaving the chart.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double last_valid_s)
      : std::runtime_error(what), last_valid_s_(last_valid_s) {}

  double last_valid_s() const noexcept { return last_valid_s_; }

 private:
  double last_valid_s_;
};

}  // namespace warpsol
