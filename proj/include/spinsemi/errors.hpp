#pragma once

#include <stdexcept>
#include <string>

namespace spinsemi {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input or violated precondition. The CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure on admissible input. The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class ParameterError : public InputError {
 public:
  using InputError::InputError;
};

class NotRealPointError : public InputError {
 public:
  using InputError::InputError;
};

class OutOfRangeError : public InputError {
 public:
  using InputError::InputError;
};

/// A stereographic coordinate diverges or a 1 + zeta*eta denominator vanishes.
class PoleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepLimitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateLabelError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BranchTrackingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace spinsemi
