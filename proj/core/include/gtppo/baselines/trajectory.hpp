#pragma once

#include <functional>
#include <vector>

#include "gtppo/env/control_env.hpp"

namespace gtppo::baselines {

using dynamics::State2;

struct Trajectory {
  std::vector<State2> states;     // T + 1 states
  std::vector<double> controls;   // T applied (clamped) controls
  double cost = 0.0;              // sum of stage costs plus phase-end terminal costs
  bool success = false;           // final state inside the last phase's target region
};

// Rolls a control law through a control environment from x0. `law` receives
// the step index and the current state and returns the raw control.
Trajectory rollout(const env::EnvConfig& cfg, const State2& x0, const std::function<double(int, const State2&)>& law);

// Rolls an open-loop control sequence (clamped to the bounds).
Trajectory rollout_open_loop(const env::EnvConfig& cfg, const State2& x0, const std::vector<double>& controls);

}  // namespace gtppo::baselines
