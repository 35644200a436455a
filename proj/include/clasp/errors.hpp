#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clasp {

/// Raised when a caller breaks a documented precondition (dimension
/// mismatch, out-of-range parameter, empty input).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The round's feasible set K_t (or the historical intersection) is empty.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(std::size_t round, const std::string& what)
      : std::runtime_error("round " + std::to_string(round) + ": " + what), round_(round) {}

  std::size_t round() const noexcept { return round_; }

 private:
  std::size_t round_;
};

class DiameterUnavailable : public std::logic_error {
 public:
  DiameterUnavailable()
      : std::logic_error("diameter unavailable for this set variant; supply D explicitly") {}
};

class MissingDiagnostics : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dataset parse failure. `row()` is the 1-based line number in the file
/// (0 when the failure is not tied to a row, e.g. a missing file).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : std::runtime_error(row == 0 ? what : "row " + std::to_string(row) + ": " + what),
        row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

namespace detail {

inline void require(bool condition, const char* message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace detail
}  // namespace clasp
