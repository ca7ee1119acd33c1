#pragma once

#include <stdexcept>
#include <string>

namespace branchnet {

// Malformed or out-of-contract input (bad parameters, degenerate geometry,
// incompatible measures).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// File or schema problems; the message carries the file/field location.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A structural identity or bound that must hold did not.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace branchnet
