#pragma once

#include <stdexcept>
#include <string>

namespace tactile {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data, parameters or configuration. Maps to CLI exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class RangeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptyResultError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Training set cannot produce a model (single class, missing material, folds).
class TrainingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Model pipeline constants disagree with the evaluation configuration.
class ProvenanceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Solver hit its iteration cap before meeting the optimality tolerance. Exit code 2.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Exit code 3.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tactile
