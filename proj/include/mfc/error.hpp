#pragma once

#include <stdexcept>
#include <string>

namespace mfc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver did not reach its tolerance within the allowed iterations.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing an output file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mfc
