#pragma once

#include <stdexcept>
#include <string>

namespace sigverify {

// Base for every error raised by the library. The CLI maps these to exit
// code 1; argument errors map to 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

// Zero reference baseline or zero fusion spread: signals duplicated inputs.
class DegenerateError : public DomainError {
 public:
  using DomainError::DomainError;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace sigverify
