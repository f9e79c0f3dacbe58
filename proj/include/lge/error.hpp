#pragma once

#include <stdexcept>
#include <string>

namespace lge {

// Raised when inputs violate a documented contract (bad label code, dims
// mismatch, empty input where one is required). The CLI maps it to exit 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Raised for filesystem failures. The CLI maps it to exit 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lge
