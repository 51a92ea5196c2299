#pragma once

#include <stdexcept>
#include <string>

namespace pai {

/// Root of the library's failure hierarchy.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problems with inputs: files, arguments, shapes. CLI exit code 2.
struct ValidationError : Error {
  using Error::Error;
};
struct DimensionError : ValidationError {
  using ValidationError::ValidationError;
};
struct IndexError : ValidationError {
  using ValidationError::ValidationError;
};

// Model or numerical failures. CLI exit code 3.
struct NumericalError : Error {
  using Error::Error;
};
struct NotInvertibleError : NumericalError {
  using NumericalError::NumericalError;
};
struct IllConditionedError : NumericalError {
  using NumericalError::NumericalError;
};
struct UnderdeterminedError : NumericalError {
  using NumericalError::NumericalError;
};
struct RankDeficientError : NumericalError {
  using NumericalError::NumericalError;
};
struct SingularSystemError : NumericalError {
  using NumericalError::NumericalError;
};
struct NoFeasibleModelError : NumericalError {
  using NumericalError::NumericalError;
};
struct SearchSpaceError : NumericalError {
  using NumericalError::NumericalError;
};
struct UnsupportedKernelError : NumericalError {
  using NumericalError::NumericalError;
};
struct UnsupportedLayerError : NumericalError {
  using NumericalError::NumericalError;
};
struct TooFewPointsError : NumericalError {
  using NumericalError::NumericalError;
};
struct DegenerateDataError : NumericalError {
  using NumericalError::NumericalError;
};
struct StateError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace pai
