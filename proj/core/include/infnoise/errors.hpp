#pragma once

#include <stdexcept>
#include <string>

namespace infnoise {

// Invalid model/kernel/experiment specification. CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A deterministic property the harness guarantees (Weyl, exact kernel
// identities, Laplacian structure, finite records) was violated at run
// time. CLI exit code 3.
class PropertyViolation : public std::runtime_error {
 public:
  explicit PropertyViolation(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace infnoise
