#pragma once

#include <stdexcept>
#include <string>

namespace semeq {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration values or inconsistent artifact metadata (exit 1).
struct ConfigError : Error {
  using Error::Error;
};

/// An operation was called outside its contract (exit 1).
struct UsageError : Error {
  using Error::Error;
};

/// Missing or unreadable artifact files (exit 1).
struct FileError : Error {
  using Error::Error;
};

/// Numerical failure at runtime: divergence, non-finite values (exit 2).
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace semeq
