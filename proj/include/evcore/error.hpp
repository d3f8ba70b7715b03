#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evcore {

// Base for every error raised by the library. The CLI maps NumericalError to
// exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Vector/matrix sizes that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed input file (IDX, checkpoint, CSV, config).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Requested an operation that the chosen activation cannot support.
class UnsupportedActivationError : public Error {
 public:
  using Error::Error;
};

// Numerical failures abort training; they carry enough context to locate the
// offending value.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public NumericalError {
 public:
  OverflowError(const std::string& what, std::size_t index)
      : NumericalError(what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// The evidence-form correct-evidence regularizer diverges at zero evidence.
class InfiniteRegularizerError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace evcore
