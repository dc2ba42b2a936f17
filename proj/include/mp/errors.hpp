#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape violations; the message names the offending axes.
struct DimensionError : Error {
  using Error::Error;
};

// Invalid configuration values (rates, sizes, fractions, paths).
struct ConfigError : Error {
  using Error::Error;
};

// Pooling window does not fit the input.
struct GeometryError : Error {
  using Error::Error;
};

// Invalid runtime input (empty text, bad label, eval-mode cache).
struct InputError : Error {
  using Error::Error;
};

// A structured file could not be parsed; carries the byte offset.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t at)
      : Error(what + " (byte offset " + std::to_string(at) + ")"), offset(at) {}
  std::size_t offset = 0;
};

// TSV column layout does not match the declared schema.
struct SchemaError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// Training produced a non-finite loss.
struct DivergenceError : Error {
  using Error::Error;
};

}  // namespace mp
