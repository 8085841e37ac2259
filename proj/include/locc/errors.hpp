#pragma once

#include <stdexcept>
#include <string>

namespace locc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dimension argument is out of range or two operands disagree in size.
class InvalidDimension : public Error {
 public:
  using Error::Error;
};

/// A probability vector violates non-negativity, normalization or ordering.
class InvalidVector : public Error {
 public:
  using Error::Error;
};

/// A computation produced a non-finite or out-of-tolerance value.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

/// A tensor product would exceed the configured maximum length.
class LengthOverflow : public Error {
 public:
  using Error::Error;
};

/// A closed-form construction left the probability simplex.
class InfeasibleConstruction : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration could not be parsed or failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace locc
