#pragma once

#include <stdexcept>
#include <string>

namespace pilot {

// Base class for every error raised by the engine. Callers that only need to
// report a failure can catch this; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A distribution or function parameter lies outside its mathematical domain.
class ParameterDomainError : public Error {
 public:
  using Error::Error;
};

// Elicited indifference probabilities outside (0, 1].
class ElicitationError : public Error {
 public:
  using Error::Error;
};

// A user-supplied value (loss vector, config field, file contents) is invalid.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Monte Carlo estimation attempted with no samples.
class EstimationError : public Error {
 public:
  using Error::Error;
};

// The requested computation exceeds the configured work budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

}  // namespace pilot
