#pragma once

#include <stdexcept>
#include <string>

namespace nkarena {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad n/k, mismatched lengths, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The request is well-formed but exceeds what the implementation can do
/// (e.g. exhaustive enumeration beyond 2^30 states).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant did not hold (e.g. a non-positive roulette total).
class InvariantError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

/// Failure while reading a persisted landscape. `kind()` tells callers which
/// check rejected the file.
class LoadError : public Error {
 public:
  enum class Kind { io, bad_magic, version, truncated, checksum, bad_header };

  LoadError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace nkarena
