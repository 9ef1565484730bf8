#pragma once

#include <stdexcept>
#include <string>

namespace voi {

// Bad or missing configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure inside an estimator (CLI exit code 2).
class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A posterior sampler that failed its acceptance-rate diagnostic.
class ConvergenceError : public EstimatorError {
 public:
  using EstimatorError::EstimatorError;
};

}  // namespace voi
