#pragma once

#include <stdexcept>
#include <string>

namespace nocsim {

// Broken flow-control or allocation invariant. These mark simulator bugs,
// never legal network states; the simulation halts when one is raised.
class ProtocolViolation : public std::logic_error {
 public:
  explicit ProtocolViolation(const std::string& what) : std::logic_error(what) {}
};

// Invalid configuration value. The message names the offending key or
// parameter and the violated constraint.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nocsim
