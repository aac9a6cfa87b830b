#pragma once

#include <stdexcept>
#include <string>

namespace qdamp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// The truncated Fock space is too small for the requested accuracy.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, int required_dim)
      : Error(what + " (need dim >= " + std::to_string(required_dim) + ")"),
        required_dim_(required_dim) {}
  int required_dim() const { return required_dim_; }

 private:
  int required_dim_;
};

class UnderflowError : public Error {
 public:
  using Error::Error;
};

/// A state reduction was requested for a branch of zero probability.
class ImpossibleOutcome : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace qdamp
