#pragma once

#include <stdexcept>

namespace fpqmc {

/// Invalid or inconsistent configuration (bad flags, unsupported dimension, wrong scenario).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A time step could not be completed (particle escaped the domain, runaway wall recursion).
class StepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cell moments do not define valid Fokker-Planck coefficients (zero energy).
class DegenerateCellError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A persisted reference solution does not match the requested configuration.
class StaleReferenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fpqmc
