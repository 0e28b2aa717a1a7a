#pragma once

#include <stdexcept>
#include <string>

namespace jnrlab {

// Caller passed something that violates an operation's precondition
// (dimension mismatch, zero direction, unknown fixture name, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data is malformed: non-hermitian matrix, bad JSON, non-positive support value.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine failed to meet its contract.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace jnrlab
