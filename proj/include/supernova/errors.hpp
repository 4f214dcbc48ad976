#pragma once

#include <stdexcept>
#include <string>

namespace supernova {

// Transient endpoint/network failure; callers may retry with backoff.
struct EndpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Broken setup (dimension mismatch, bad config value). Not retriable.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Pipeline ordering violation (stage run before its inputs exist).
struct StageOrderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace supernova
