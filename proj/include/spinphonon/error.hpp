#pragma once

#include <stdexcept>
#include <string>

namespace spinphonon {

/// A value violates a documented invariant or precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (bracketing, convergence, tolerance breach).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The experiment configuration is unreadable or inconsistent.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spinphonon
