#pragma once

#include <stdexcept>
#include <string>

namespace sns {

// Error categories map onto distinct CLI exit codes.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, long step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_index(step) {}
  long step_index;
};

struct StatisticsRefused : std::runtime_error {
  explicit StatisticsRefused(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sns
