#pragma once

#include <stdexcept>
#include <string>

namespace qrelay {

// Base of every error thrown by the library. The CLI maps ConfigError to exit
// status 2 and everything else to 3.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

class InvalidStateError : public Error {
public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
public:
  using Error::Error;
};

class AlphabetOverflowError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace qrelay
