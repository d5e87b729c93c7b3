#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iotnames {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data or arguments: malformed names, empty lists, bad sizes.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Filesystem and network failures.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A dotted name with an empty segment. `segment` is 1-based.
class StructuralError : public InputError {
 public:
  StructuralError(const std::string& text, std::size_t segment)
      : InputError("empty label at segment " + std::to_string(segment) + " in '" + text + "'"),
        segment_(segment) {}

  std::size_t segment() const noexcept { return segment_; }

 private:
  std::size_t segment_;
};

}  // namespace iotnames
