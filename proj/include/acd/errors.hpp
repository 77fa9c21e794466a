#pragma once

#include <stdexcept>
#include <string>

namespace acd {

/// Malformed scenario or topology configuration. `field()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Wire-level encoding problem (bad vector length, non-binary entry, bad JSON).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition of a pure function.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Message exchange between agents is incomplete or inconsistent.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric routine called with parameters outside its domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace acd

namespace acd {

/// A remote endpoint could not be reached or answered with a transport-level error.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TimeoutError : public TransportError {
 public:
  using TransportError::TransportError;
};

}  // namespace acd
