#pragma once

#include <stdexcept>
#include <string>

namespace citeweave {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition of an operation was not met by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace citeweave
