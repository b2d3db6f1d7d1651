#pragma once

#include <stdexcept>
#include <string>

namespace osrf {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or non-finite input data.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation (c <= 0, alpha out of range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Exponent pair violates a spectral condition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent configuration (unknown psi variant for a given E, bad key, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Too few samples for a statistical estimator.
class StatisticalError : public Error {
 public:
  using Error::Error;
};

/// Frequency plan would exceed the configured cell budget.
class PlanTooLarge : public Error {
 public:
  using Error::Error;
};

/// Non-convergence, non-finite accumulation or internal inconsistency.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace osrf
