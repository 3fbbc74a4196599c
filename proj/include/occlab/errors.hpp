#pragma once

#include <stdexcept>
#include <string>

namespace occlab {

// Bad experiment configuration or arguments; the CLI maps this to exit 65.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The request would exceed a stated size/compute budget.
struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// Inputs too coarse for the requested scale (e.g. delta below the cloud
// resolution floor), so any answer would be noise.
struct UnreliableInputError : std::runtime_error {
  explicit UnreliableInputError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace occlab
