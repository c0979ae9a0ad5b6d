#pragma once

#include <stdexcept>
#include <string>

namespace nlps {

/// Invalid or inconsistent configuration, detected before any simulation work.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Failure while a valid configuration is being executed.
struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nlps
