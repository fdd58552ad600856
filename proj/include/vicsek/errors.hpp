#pragma once
// Error taxonomy. The CLI maps these to process exit codes:
//   ConfigError -> 2, NumericalError -> 3, IoError -> 4.

#include <stdexcept>
#include <string>

namespace vicsek {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Blow-up, NaN in state, degenerate normalization, inadequate mode cutoff, ...
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace vicsek
