#pragma once

#include <stdexcept>
#include <string>

namespace dpm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed skeleton, mesh or other structural input.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument did not hold (range, cardinality, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Point at or behind the camera plane.
class BehindCameraError : public Error {
 public:
  using Error::Error;
};

/// The MLS normal equations are singular (collinear or duplicate controls).
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// Jump flood requested with pixels to fill but no Ω_D seed.
class NoSeedError : public Error {
 public:
  using Error::Error;
};

/// Covariance left the PSD cone and had to be repaired.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Configuration problem; `line()` is 0 when not tied to a file line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = 0)
      : Error(message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace dpm
