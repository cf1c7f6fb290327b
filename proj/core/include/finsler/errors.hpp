#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

// Root of every error raised by the engine.
class FinslerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A point lies outside the chart where the Finsler function is smooth.
class DomainError : public FinslerError {
 public:
  using FinslerError::FinslerError;
};

// y = 0: the Finsler function is only smooth on the slit tangent bundle.
class SlitViolation : public DomainError {
 public:
  using DomainError::DomainError;
};

class UnsupportedOrder : public FinslerError {
 public:
  using FinslerError::FinslerError;
};

class InvalidMetric : public FinslerError {
 public:
  using FinslerError::FinslerError;
};

class MetricDegenerate : public FinslerError {
 public:
  using FinslerError::FinslerError;
};

class NotConstantCurvature : public FinslerError {
 public:
  using FinslerError::FinslerError;
};

class IntegrationUnstable : public FinslerError {
 public:
  using FinslerError::FinslerError;
};

class ConsistencyFailure : public FinslerError {
 public:
  using FinslerError::FinslerError;
};

class IndicatrixSolveError : public FinslerError {
 public:
  using FinslerError::FinslerError;
};

class TangencyError : public FinslerError {
 public:
  using FinslerError::FinslerError;
};

// Caller broke an operation precondition that is not a domain question
// (e.g. asking for the projective factor of a metric not flagged flat).
class PreconditionError : public FinslerError {
 public:
  using FinslerError::FinslerError;
};

}  // namespace finsler
