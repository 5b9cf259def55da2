#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace scdp {

// Argument outside the mathematical domain of an operation (rank out of
// range, alpha != 4 for the alpha-4 closed form, negative incomplete-gamma
// argument, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Structurally invalid configuration (length mismatch, K*L >= N, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numeric procedure failed to converge.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what,
                        std::array<double, 2> last_estimates = {0.0, 0.0})
      : std::runtime_error(what), last_estimates_(last_estimates) {}

  const std::array<double, 2>& last_estimates() const noexcept {
    return last_estimates_;
  }

 private:
  std::array<double, 2> last_estimates_;
};

// Root bracket does not contain a sign change.
class BracketError : public NumericError {
 public:
  BracketError(const std::string& what, double lo, double hi)
      : NumericError(what, {lo, hi}) {}
};

}  // namespace scdp
