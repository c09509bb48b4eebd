#pragma once

#include <stdexcept>
#include <string>

namespace ckm {

/// Malformed or out-of-contract input (dimension mismatch, empty set, bad flag value).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input that is well-formed but geometrically degenerate for the requested operation.
class DegenerateInputError : public InputError {
 public:
  using InputError::InputError;
};

/// The instance exceeds a hard size cap of an exhaustive solver.
class RefusalError : public InputError {
 public:
  using InputError::InputError;
};

/// A checked mathematical condition (consistency inequality, lemma bound) failed.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No candidate admits a partition satisfying the constraint.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ckm
