#pragma once

#include <stdexcept>
#include <string>

namespace marlab {

/// Caller passed arguments that violate an operation's preconditions.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested construction exceeds the hard size caps.
class ResourceError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A model file or measure failed validation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A measure puts mass where its would-be dominating measure puts none.
class DominationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace marlab
