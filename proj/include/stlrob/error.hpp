#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stlrob {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Formula text could not be parsed. `position` is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A value lies outside the domain an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or configuration document.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// The formula uses a construct the evaluators do not support (Until).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace stlrob
