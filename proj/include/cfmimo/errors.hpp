#pragma once

#include <stdexcept>

namespace cfmimo {

/// Bad usage or malformed configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Corrupt, truncated or inconsistent data files.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cfmimo
