#pragma once

#include <stdexcept>
#include <string>

namespace tvdeblur {

/// Bad argument shape, size, or parameter value.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An operation was requested for a boundary condition that does not support it
/// (e.g. transform eigenvalues under zero-Dirichlet).
class UnsupportedBoundary : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

/// Inconsistent restoration or sweep configuration, detected before any compute.
class ConfigurationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Base class for failures of a numerical procedure.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IndefinitePreconditioner : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class InvalidScaling : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Input claimed to belong to a matrix algebra but does not, beyond tolerance.
class ConsistencyError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Krylov solver failure: NaN inner products, loss of definiteness, or a
/// BiCGstab breakdown. Carries the iteration at which it was detected.
class SolverBreakdown : public NumericalError {
public:
  SolverBreakdown(const std::string& what, int iteration)
      : NumericalError(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

private:
  int iteration_;
};

} // namespace tvdeblur
