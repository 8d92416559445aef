#pragma once

#include <stdexcept>
#include <string>

namespace gtppo {

// Invalid shapes, unknown keys, out-of-range parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite derivative or state during numerical integration.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t)
      : std::runtime_error(what + " (t=" + std::to_string(t) + ")"), t_(t) {}
  double time() const { return t_; }

 private:
  double t_;
};

// Non-finite loss or gradient during optimization.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gtppo
