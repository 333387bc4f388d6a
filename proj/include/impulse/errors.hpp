#pragma once

#include <stdexcept>
#include <string>

namespace impulse {

/// Argument outside the mathematical domain of an operation (negative state, x0 <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A modelling hypothesis (sector condition, curve ordering) cannot be met.
class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The drift margin rate - sigma^2/2 is not positive.
class MarginError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Bad constructor parameter (gamma outside ]0,1[, non-increasing table knots, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// No simulated path reached the first pulse before the horizon.
class HorizonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace impulse
