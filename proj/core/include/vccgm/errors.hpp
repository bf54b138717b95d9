#pragma once

#include <stdexcept>
#include <string>

namespace vccgm {

// Error taxonomy. DataError covers malformed, missing or insufficient
// inputs (CLI exit code 3); NumericalError covers non-finite values and
// degenerate numerics (CLI exit code 4); UsageError is bad invocation
// (CLI exit code 2).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : Error {
  using Error::Error;
};

struct DataError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

struct EmptyDataset : DataError {
  using DataError::DataError;
};

struct OutOfRange : DataError {
  using DataError::DataError;
};

struct InsufficientLabels : DataError {
  using DataError::DataError;
};

struct InsufficientSamples : DataError {
  using DataError::DataError;
};

struct EmptyVicinity : DataError {
  using DataError::DataError;
};

struct InvalidMode : DataError {
  using DataError::DataError;
};

struct InvalidSpec : DataError {
  using DataError::DataError;
};

struct WindowTooSparse : DataError {
  using DataError::DataError;
};

struct ShapeError : NumericalError {
  using NumericalError::NumericalError;
};

struct InvalidCovariance : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace vccgm
