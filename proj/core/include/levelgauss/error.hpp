#pragma once

#include <stdexcept>
#include <string>

namespace levelgauss {

/// Thrown when an input violates an operation's precondition
/// (dimension mismatch, invalid weights, bad plan marginals, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown by experiment configuration parsing and validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical condition that the computation could not resolve, e.g. a
/// critical point on the domain boundary that survives node jitter.
class NumericalFlag : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace levelgauss
