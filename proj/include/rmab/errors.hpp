#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace rmab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RowSumError : public Error {
 public:
  RowSumError(std::size_t row, double sum)
      : Error("row " + std::to_string(row) + " sums to " + std::to_string(sum)),
        row(row),
        sum(sum) {}
  std::size_t row;
  double sum;
};

class NegativeEntryError : public Error {
 public:
  NegativeEntryError(std::size_t row, std::size_t col)
      : Error("entry (" + std::to_string(row) + ", " + std::to_string(col) +
              ") outside [0, 1]"),
        row(row),
        col(col) {}
  std::size_t row;
  std::size_t col;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class BudgetViolation : public Error {
 public:
  BudgetViolation(std::size_t count, std::size_t budget)
      : Error("active count " + std::to_string(count) + " != budget " +
              std::to_string(budget)),
        count(count),
        budget(budget) {}
  std::size_t count;
  std::size_t budget;
};

class UnknownCategory : public Error {
 public:
  explicit UnknownCategory(const std::string& label)
      : Error("unknown category '" + label + "'"), label(label) {}
  std::string label;
};

class NoConvergence : public Error {
 public:
  NoConvergence(std::int64_t max_iters, double residual_span)
      : Error("value iteration did not converge in " + std::to_string(max_iters) +
              " iterations (span " + std::to_string(residual_span) + ")"),
        max_iters(max_iters),
        residual_span(residual_span) {}
  std::int64_t max_iters;
  double residual_span;
};

class BracketFailure : public Error {
 public:
  explicit BracketFailure(std::size_t state)
      : Error("no sign change of the indifference gap for state " + std::to_string(state)),
        state(state) {}
  std::size_t state;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class CapacityExceeded : public Error {
 public:
  CapacityExceeded(double required, double cap)
      : Error("joint table needs " + whole(required) + " entries, cap is " + whole(cap)),
        required(required),
        cap(cap) {}
  double required;
  double cap;

 private:
  static std::string whole(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.0f", x);
    return buf;
  }
};

class ZeroDt : public Error {
 public:
  ZeroDt() : Error("sample interval must be positive") {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rmab
