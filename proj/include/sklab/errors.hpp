#pragma once

#include <stdexcept>
#include <string>

namespace sklab {

// Config / input schema problems. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Divergent or non-finite numerics. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Request exceeds an enumeration / memory budget. CLI exit code 4.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sklab
