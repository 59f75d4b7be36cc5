#pragma once

#include <stdexcept>
#include <string>

namespace labandit {

/// Bad input: parameters outside their domain, malformed configs, broken
/// preconditions. The CLI maps this to exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested computation would exceed the configured state-space cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal self-check failed (e.g. an identity that must hold for any
/// correctly implemented utility index).
class SelfCheckError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace labandit
