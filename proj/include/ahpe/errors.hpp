#pragma once

#include <stdexcept>
#include <string>

namespace ahpe {

// Caller broke a documented precondition (mismatched base points, bad t, ...).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Inputs are well formed but violate a validity condition of the method.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : ValidationError {
  using ValidationError::ValidationError;
};

// An inexact-prox certificate or monitored invariant failed under enforce.
struct CertificateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ahpe
