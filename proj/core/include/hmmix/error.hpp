#pragma once

#include <stdexcept>
#include <string>

namespace hmmix {

// Base for every error raised by the library. The CLI maps the concrete
// category onto an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or missing input columns / cells.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

// Invalid distribution parameters (non-positive scale etc).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A documented invariant of an input does not hold.
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

// All gap lengths equal one, so the log-distance scale collapses.
class DegenerateScaleError : public Error {
 public:
  using Error::Error;
};

class ZeroVarianceError : public Error {
 public:
  using Error::Error;
};

// Failures from inside the Markov chain (filter degeneracy, rejection budget,
// singular covariance). Carry the iteration index when raised from run_mcmc.
class SamplerError : public Error {
 public:
  using Error::Error;
};

class FilterDegeneracyError : public SamplerError {
 public:
  using SamplerError::SamplerError;
};

class FilterInconsistencyError : public SamplerError {
 public:
  using SamplerError::SamplerError;
};

class OrderingFailureError : public SamplerError {
 public:
  using SamplerError::SamplerError;
};

class LinearAlgebraError : public SamplerError {
 public:
  using SamplerError::SamplerError;
};

}  // namespace hmmix
