#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace primepoint {

// Query outside the engine's configured range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// The iterate argument n - a*k went negative: n is too small for this (a, b).
class DomainCollapse : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The iteration ran past its step budget. The budget is provably sufficient,
// so this firing means a bug, not a slow input.
class IterationBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed b-file input; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace primepoint
