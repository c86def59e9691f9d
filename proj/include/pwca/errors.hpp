#pragma once

#include <stdexcept>
#include <string>

namespace pwca {

// Error taxonomy. The three intermediate bases map onto the CLI exit codes:
// UsageError -> 1, DataError -> 2, NumericalError -> 3.
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

struct InvalidArgument : UsageError {
  using UsageError::UsageError;
};

struct DimensionMismatch : DataError {
  using DataError::DataError;
};
struct TooFewViews : DataError {
  using DataError::DataError;
};
struct ParseError : DataError {
  using DataError::DataError;
};
struct OutOfRange : DataError {
  using DataError::DataError;
};
struct IndexOutOfRange : DataError {
  using DataError::DataError;
};
struct EmptyInput : DataError {
  using DataError::DataError;
};
struct EmptyEmbedding : DataError {
  using DataError::DataError;
};
struct SampleOutOfGrid : DataError {
  using DataError::DataError;
};
struct SampleSizeTooSmall : DataError {
  using DataError::DataError;
};
struct InvalidConfig : DataError {
  using DataError::DataError;
};
struct InvalidSplit : DataError {
  using DataError::DataError;
};
struct NegativeEntry : DataError {
  using DataError::DataError;
};
struct InconsistentReports : DataError {
  using DataError::DataError;
};

struct NotPositiveDefinite : NumericalError {
  using NumericalError::NumericalError;
};
struct Infeasible : NumericalError {
  using NumericalError::NumericalError;
};

} // namespace pwca
