#pragma once

#include <stdexcept>

namespace rpcf {

/// Raised for violated numeric preconditions (non-finite data, symmetry, shape).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or missing configuration: unknown keys, malformed values, absent assets.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rpcf
