#pragma once

#include <stdexcept>
#include <string>

namespace synthqa {

/// Malformed or inconsistent input data (bad records, broken invariants,
/// unknown ids). Maps to exit code 2 at the command line.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad caller arguments (unknown variant name, out-of-range config).
/// Maps to exit code 1 at the command line.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace synthqa
