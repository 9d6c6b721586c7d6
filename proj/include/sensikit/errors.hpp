#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sensikit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A factor group refers to an index outside [0, d) or repeats an index.
class InvalidGroupError : public Error {
 public:
  using Error::Error;
};

/// Input sequences with mismatched lengths or matrices with mismatched shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A ratio estimator hit a zero denominator, or the total-variance estimate is not positive.
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

class InsufficientSampleError : public Error {
 public:
  using Error::Error;
};

/// Model parameters for which the closed-form indices do not exist (g-function a_i = -1, all-zero additive coefficients).
class SingularParameterError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IncompatibleTablesError : public Error {
 public:
  using Error::Error;
};

class ModelEvaluationError : public Error {
 public:
  ModelEvaluationError(std::string matrix, std::size_t row, const std::string& what)
      : Error("model evaluation failed on matrix " + matrix + ", row " + std::to_string(row) + ": " + what),
        matrix_(std::move(matrix)),
        row_(row) {}

  const std::string& matrix() const noexcept { return matrix_; }
  std::size_t row() const noexcept { return row_; }

 private:
  std::string matrix_;
  std::size_t row_;
};

}  // namespace sensikit
