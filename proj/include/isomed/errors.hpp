#pragma once

#include <stdexcept>
#include <string>

namespace isomed {

/// Bad argument values: out-of-range indices, invalid probabilities, ...
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed or insufficient input data.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Problem size exceeds a hard implementation limit.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// The requested error level cannot be attained from the given inputs.
class CalibrationError : public std::runtime_error {
 public:
  explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

/// Data and critical values were produced for different designs.
class DesignMismatchError : public std::runtime_error {
 public:
  explicit DesignMismatchError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace isomed
