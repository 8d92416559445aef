#include "gtppo/env/config.hpp"

#include <cmath>

namespace gtppo::env {

namespace {
bool symmetric_psd(const Mat2& m) {
  if (m[0][1] != m[1][0]) return false;
  return m[0][0] >= 0.0 && m[1][1] >= 0.0 && m[0][0] * m[1][1] - m[0][1] * m[1][0] >= 0.0;
}
}  // namespace

void PhaseSpec::validate() const {
  if (!(duration > 0.0)) throw ConfigError("phase duration must be positive");
  if (!symmetric_psd(Q)) throw ConfigError("phase Q must be symmetric positive semidefinite");
  if (!symmetric_psd(Qf)) throw ConfigError("phase terminal weight must be symmetric positive semidefinite");
  if (!(R > 0.0)) throw ConfigError("phase control cost R must be positive");
  if (!(target_radius > 0.0)) throw ConfigError("phase target radius must be positive");
}

void RocketRewardConfig::validate() const {
  if (!(tol_a > 0.0 && tol_e > 0.0 && tol_angle > 0.0)) throw ConfigError("insertion tolerances must be positive");
  if (!(pitch_end_altitude > pitch_start_altitude)) {
    throw ConfigError("pitch program end altitude must exceed its start altitude");
  }
  if (kappa_a < 0.0 || kappa_e < 0.0 || kappa_i < 0.0) throw ConfigError("orbital shaping rates must be non-negative");
}

int EnvConfig::episode_steps() const {
  if (system == SystemId::rocket) return rocket_max_steps;
  int n = 0;
  for (const auto& p : phases) n += static_cast<int>(std::lround(p.duration / dt));
  return n;
}

int EnvConfig::obs_dim() const {
  if (system == SystemId::rocket) return 9;
  return multiphase() ? 6 : 2;
}

void EnvConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("env.dt must be positive");
  if (system == SystemId::rocket) {
    constants.validate();
    vehicle.validate();
    schedule.validate(vehicle);
    rocket_reward.validate();
    if (rocket_max_steps <= 0) throw ConfigError("env.rocket_max_steps must be positive");
    if (rocket_max_steps * dt > schedule.horizon() + 1e-9) {
      throw ConfigError("rocket episode runs past the end of the phase schedule");
    }
    return;
  }
  if (phases.empty()) throw ConfigError("env.phases must not be empty");
  for (const auto& p : phases) {
    p.validate();
    const double steps = p.duration / dt;
    if (std::fabs(steps - std::round(steps)) > 1e-9) throw ConfigError("phase duration must be a multiple of dt");
  }
  for (int i = 0; i < 2; ++i) {
    if (!(state_high[i] > state_low[i])) throw ConfigError("env state bounds must be non-empty intervals");
  }
  if (!(u_max > 0.0)) throw ConfigError("env.u_max must be positive");
  if (eps < 0.0) throw ConfigError("env.eps must be non-negative");
}

const std::vector<std::string>& environment_ids() {
  static const std::vector<std::string> ids{"di", "vdp", "di-multi", "vdp-multi", "rocket"};
  return ids;
}

EnvConfig default_env_config(const std::string& id) {
  EnvConfig c;
  c.id = id;
  if (id == "di") {
    c.system = SystemId::di;
    c.u_max = 4.0;
    c.phases = {PhaseSpec{5.0, {0.0, 0.0}, 0.05, diag2(1, 1), 0.1, diag2(20, 20), 20.0}};
  } else if (id == "di-multi") {
    c.system = SystemId::di;
    c.u_max = 3.0;
    c.phases = {PhaseSpec{5.0, {0.0, 0.0}, 0.02, diag2(1, 1), 0.1, diag2(20, 20), 20.0},
                PhaseSpec{5.0, {0.5, 0.5}, 0.02, diag2(1, 1), 0.1, diag2(30, 30), 20.0}};
  } else if (id == "vdp") {
    c.system = SystemId::vdp;
    c.u_max = 1.5;
    c.phases = {PhaseSpec{7.0, {0.0, 0.0}, 0.05, diag2(1, 1), 1.0, diag2(20, 20), 20.0}};
  } else if (id == "vdp-multi") {
    c.system = SystemId::vdp;
    c.u_max = 1.5;
    c.phases = {PhaseSpec{5.0, {0.0, 0.0}, 0.05, diag2(1, 1), 0.005, diag2(25, 25), 25.0},
                PhaseSpec{4.0, {0.2, 0.2}, 0.05, diag2(1, 1), 0.005, diag2(30, 30), 30.0},
                PhaseSpec{5.0, {0.5, 0.5}, 0.05, diag2(1, 1), 0.01, diag2(40, 40), 40.0}};
  } else if (id == "rocket") {
    c.system = SystemId::rocket;
    c.dt = 2.0;
    c.phases.clear();
  } else {
    throw ConfigError("unknown environment '" + id + "' (expected di, vdp, di-multi, vdp-multi or rocket)");
  }
  return c;
}

}  // namespace gtppo::env
