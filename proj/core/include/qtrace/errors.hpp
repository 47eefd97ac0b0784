#pragma once

#include <stdexcept>
#include <string>

namespace qtrace {

// Two families: PreconditionError means the caller asked for something
// outside an operation's domain; ComputationError means a valid request
// could not be completed (tolerance, budget, degenerate geometry).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ComputationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain (non-discriminant, pole, ...).
class DomainError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Plus-space condition (-1)^lambda n = 0,1 mod 4 violated, or 4 does not divide c.
class AdmissibilityError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Configured cap (series length, factorization bound, scan length) exceeded.
class ResourceError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Requested evaluation mode cannot deliver the precision budget.
class ModeError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class AccuracyError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class SearchError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class PrecisionError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class DegeneratePositionError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

}  // namespace qtrace
