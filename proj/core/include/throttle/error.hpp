#pragma once

#include <stdexcept>
#include <string>

namespace throttle {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input values, malformed policies, malformed files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A file or config could not be parsed.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// An operation was called in a state its contract forbids.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Failures while a scenario is running (exhausted verdict sources, bad logs).
class ScenarioError : public Error {
 public:
  using Error::Error;
};

class SourceExhausted : public ScenarioError {
 public:
  using ScenarioError::ScenarioError;
};

/// The requested efficacy is never met by the curve.
class UnreachableTarget : public Error {
 public:
  using Error::Error;
};

/// Host process has exited or the handle was never attached.
class StaleHandle : public Error {
 public:
  using Error::Error;
};

}  // namespace throttle
