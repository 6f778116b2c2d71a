#pragma once

#include <stdexcept>
#include <string>

namespace taxmine {

// Bad configuration (unknown keys, out-of-range thresholds). CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed artifact content or violated data contracts. CLI exit code 4.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A stage input produced by an earlier stage is absent. CLI exit code 3.
struct MissingArtifactError : std::runtime_error {
  explicit MissingArtifactError(const std::string& path)
      : std::runtime_error("missing artifact: " + path), artifact(path) {}
  std::string artifact;
};

}  // namespace taxmine
