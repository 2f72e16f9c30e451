#pragma once

#include <stdexcept>
#include <string>

namespace gpx {

// Invalid process specification or violated precondition (CLI exit code 1).
class SpecViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Evaluation outside the declared domain of a profile.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Inconsistent inputs handed to a formula (e.g. constants for the wrong alpha).
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for failures of a numerical procedure on valid input (CLI exit code 2).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BracketError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class NotPositiveDefinite : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class SamplerError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class IndeterminateClassification : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace gpx
