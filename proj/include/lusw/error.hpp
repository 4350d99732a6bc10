#pragma once

#include <stdexcept>
#include <string>

namespace lusw {

/// Invalid grid, parameter, or noise configuration. `key()` names the
/// offending configuration entry when one is known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::string key = {})
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Non-finite values produced while advancing a trajectory.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Snapshot / CSV read-write failures.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lusw
