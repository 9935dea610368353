#pragma once

#include <stdexcept>
#include <string>

namespace relbc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation mixed bit chains of different lengths.
struct LengthMismatch : Error {
  using Error::Error;
};

// Requested more distinct chains than the value space holds.
struct Unsatisfiable : Error {
  using Error::Error;
};

// Station id not present in the geometry.
struct UnknownStation : Error {
  using Error::Error;
};

// A handler tried to schedule an event in its own past.
struct CausalityViolation : Error {
  using Error::Error;
};

// Invalid or inconsistent scenario parameters.
struct ConfigError : Error {
  using Error::Error;
};

// Enumeration would exceed the configured state-space bound.
struct TooLarge : Error {
  using Error::Error;
};

// Exact rational arithmetic left the 64-bit range.
struct OverflowError : Error {
  using Error::Error;
};

// Malformed textual input (bit chains, numbers, config files).
struct ParseError : Error {
  using Error::Error;
};

}  // namespace relbc
