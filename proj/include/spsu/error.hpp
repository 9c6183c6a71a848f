#pragma once

#include <stdexcept>
#include <string>

namespace spsu {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

/// Shape or size mismatch; the message names the offending pair.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent user-provided configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unreadable, corrupt or degenerate data (files, non-finite values).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure inside an iterative routine.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace spsu
