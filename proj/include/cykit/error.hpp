#pragma once

#include <stdexcept>
#include <string>

namespace cykit {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input: bad JSON, unknown fields, schema mismatch.
struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

// An exact identity that must hold failed: d^2 != 0, chain-map violation,
// mixed scalar fields, normalization leak.
struct IntegrityError : Error {
  explicit IntegrityError(const std::string& msg) : Error(msg) {}
};

// A precondition is not satisfied and the operation declines to proceed
// (non-terminating enumeration, non-free tensor factor, unsupported shape).
struct RefusalError : Error {
  explicit RefusalError(const std::string& msg) : Error(msg) {}
};

}  // namespace cykit
