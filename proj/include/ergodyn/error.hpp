#pragma once

#include <stdexcept>
#include <string>

namespace ergodyn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: dimension or size mismatch, violated preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

// The requested analysis is not defined for this family (e.g. exact periodic
// orbits of an irrational rotation). The message names the fallback.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// A configured size or work budget would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace ergodyn
