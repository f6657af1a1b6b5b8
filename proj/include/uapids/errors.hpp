#pragma once

#include <stdexcept>
#include <string>

namespace uapids {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument values (non-finite input, negative counts, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Column/feature layout does not match what the schema expects.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or missing configuration; the CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Missing or unreadable input file; also exit code 2 from the CLI.
class IoError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss or parameter.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace uapids
