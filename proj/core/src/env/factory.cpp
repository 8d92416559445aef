#include "gtppo/env/control_env.hpp"
#include "gtppo/env/rocket_env.hpp"

namespace gtppo::env {

std::unique_ptr<Environment> make_environment(const EnvConfig& cfg) {
  if (cfg.system == SystemId::rocket) return std::make_unique<RocketEnv>(cfg);
  return std::make_unique<ControlEnv>(cfg);
}

}  // namespace gtppo::env
