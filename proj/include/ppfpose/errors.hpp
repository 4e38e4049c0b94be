#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ppfpose {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// vex() received a matrix that is not skew-symmetric.
class NotAntisymmetric : public Error {
 public:
  using Error::Error;
};

/// A transformed error was requested outside the open envelope interval
/// while strict mode was active.
class EnvelopeViolation : public Error {
 public:
  EnvelopeViolation(const std::string& what, std::size_t channel)
      : Error(what), channel_(channel) {}
  std::size_t channel() const noexcept { return channel_; }

 private:
  std::size_t channel_;
};

/// Attitude error is (numerically) a rotation by pi; the correction law
/// divides by 1 - ||R~||_I.
class NearSingular : public Error {
 public:
  using Error::Error;
};

/// Integration produced non-finite values.
class Diverged : public Error {
 public:
  using Error::Error;
};

class CollinearInputs : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// Reference set or measurement lists are inconsistent (lengths, counts).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Scenario or file configuration is unusable.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ppfpose
