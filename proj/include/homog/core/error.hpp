#pragma once

#include <stdexcept>
#include <string>

namespace homog {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes, dimensions or resolutions that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument value was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative or direct solve did not produce a usable answer.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent study configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace homog
