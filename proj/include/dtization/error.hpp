#pragma once

#include <stdexcept>
#include <string>

namespace dtz {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent input data (unreadable file, empty table, missing column...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// The requested task kind does not fit the target column.
class TaskKindMismatch : public Error {
 public:
  using Error::Error;
};

/// Caller-side contract violation (bad argument value, wrong shapes).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A persisted scaler file could not be read back.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace dtz
