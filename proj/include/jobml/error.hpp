#pragma once

#include <stdexcept>
#include <string>

namespace jobml {

// Bad user input: malformed files, invalid config values, contract violations
// at the API boundary. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Failures during execution (shape mismatches, corrupt checkpoints,
// non-finite loss). The CLI maps this to exit code 2.
class RuntimeError : public std::runtime_error {
 public:
  explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

// Shape incompatibility between tensors; the message names both shapes.
class DimensionError : public RuntimeError {
 public:
  explicit DimensionError(const std::string& what) : RuntimeError(what) {}
};

}  // namespace jobml
