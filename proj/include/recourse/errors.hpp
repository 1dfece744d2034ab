#pragma once

#include <stdexcept>
#include <string>

namespace recourse {

// Input or configuration problems: malformed CSV cells, schema violations,
// inconsistent options. The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Failures while running an otherwise well-configured job (subprocess died,
// cache fingerprint mismatch, resource cap exceeded).
class RuntimeError : public std::runtime_error {
 public:
  explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace recourse
