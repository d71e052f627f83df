#pragma once

#include <stdexcept>
#include <string>

namespace neg {

// Base class for errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an exploration budget (node or cycle limit) is exhausted.
struct LimitError : Error {
  using Error::Error;
};

}  // namespace neg
