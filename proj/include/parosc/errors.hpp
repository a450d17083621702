#pragma once

#include <stdexcept>
#include <string>

namespace parosc {

/// Base class for every numerical failure raised by the library. The CLI maps
/// these to exit code 3; everything else (bad input) is std::invalid_argument.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TruncationTooSmall : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UnstableSolution : public NumericalError {
 public:
  explicit UnstableSolution(const std::string& where)
      : NumericalError(where + ": Floquet solution is not stable") {}
};

class ZeroFrequency : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ResonantTerm : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TruncationOverflow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegreeCap : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureBudget : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace parosc
