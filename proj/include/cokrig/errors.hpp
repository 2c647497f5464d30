#pragma once

#include <stdexcept>
#include <string>

namespace cokrig {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter outside its mathematical domain (theta <= 0, n < 2, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Prediction point outside [x_start, x_end].
class ExtrapolationError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Covariance specification failed its validity checks.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Numerically singular or near-singular system.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

// Quadrature or iteration did not reach the requested accuracy.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Requested computation exceeds a hard resource cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Malformed input text (CSV, config). Message carries "source:line: ...".
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace cokrig
