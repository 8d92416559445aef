#include "gtppo/baselines/trajectory.hpp"

namespace gtppo::baselines {

Trajectory rollout(const env::EnvConfig& cfg, const State2& x0, const std::function<double(int, const State2&)>& law) {
  env::ControlEnv e(cfg);
  e.reset_to(x0);
  Trajectory tr;
  tr.states.push_back(x0);
  for (int k = 0; k < e.max_steps(); ++k) {
    const double u = law(k, e.state());
    auto res = e.step(std::span<const double>(&u, 1));
    tr.controls.push_back(res.info.applied_action[0]);
    tr.states.push_back(e.state());
    tr.cost -= res.info.components.at("running") + res.info.components.at("terminal");
    if (res.done) tr.success = res.info.success;
  }
  return tr;
}

Trajectory rollout_open_loop(const env::EnvConfig& cfg, const State2& x0, const std::vector<double>& controls) {
  if (static_cast<int>(controls.size()) != cfg.episode_steps()) {
    throw ConfigError("open-loop sequence has " + std::to_string(controls.size()) + " controls for a horizon of " +
                      std::to_string(cfg.episode_steps()));
  }
  return rollout(cfg, x0, [&](int k, const State2&) { return controls[k]; });
}

}  // namespace gtppo::baselines
