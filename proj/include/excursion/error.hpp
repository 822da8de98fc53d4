#pragma once

#include <stdexcept>
#include <string>

namespace excursion {

// Every failure raised by the library derives from Error so callers can catch
// the family in one place; the concrete type names the failing contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelEvaluationError : public Error {
 public:
  using Error::Error;
};

// Covariance could not be factored even at the largest ridge of the ladder.
class SingularModelError : public Error {
 public:
  using Error::Error;
};

class InvalidLevelError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class SamplerInefficiencyError : public Error {
 public:
  using Error::Error;
};

class InvalidWeightError : public Error {
 public:
  using Error::Error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class IntegrandBoundsError : public Error {
 public:
  using Error::Error;
};

class InsufficientReplicatesError : public Error {
 public:
  using Error::Error;
};

class NoHitError : public Error {
 public:
  using Error::Error;
};

// Raised by the replicate driver when too many replicates failed.
class ReplicateFailureError : public Error {
 public:
  using Error::Error;
};

}  // namespace excursion
