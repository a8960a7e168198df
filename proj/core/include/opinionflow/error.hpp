#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace opinionflow {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument outside the mathematical domain of a function (|w| > 1, u < 0, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Two consecutive particles collapsed to (numerically) zero spacing.
class SpacingUnderflow : public Error {
public:
  SpacingUnderflow(std::size_t species, std::size_t cell, double gap);
  std::size_t species;
  std::size_t cell;
  double gap;
};

/// Time integration failed; carries the offending time and particle.
class IntegrationError : public Error {
public:
  IntegrationError(const std::string& what, double t, std::size_t species, std::size_t particle);
  double t;
  std::size_t species;
  std::size_t particle;
};

class AtomizationError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  /// `line` is 0 when the error is not tied to a specific line.
  ConfigError(const std::string& what, std::size_t line, std::string key);
  std::size_t line;
  std::string key;
};

}  // namespace opinionflow
