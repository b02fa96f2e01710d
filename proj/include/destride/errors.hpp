#pragma once

#include <stdexcept>
#include <string>

namespace destride {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A malformed argument, e.g. a sampling offset larger than its stride.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// An element or range index outside the addressed object.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Operand shapes that do not conform (dimension mismatch, filter larger than image, ...).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A feature map whose extent is not a multiple of the sampling stride the rewrite needs.
class DivisibilityError : public ShapeError {
 public:
  using ShapeError::ShapeError;
};

// Malformed or unsupported network document.
class SpecError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace destride
