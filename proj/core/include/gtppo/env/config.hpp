#pragma once

#include <array>
#include <string>
#include <vector>

#include "gtppo/dynamics/rocket.hpp"
#include "gtppo/orbital/elements.hpp"

namespace gtppo::env {

using Mat2 = std::array<std::array<double, 2>, 2>;

inline Mat2 diag2(double a, double b) { return {{{a, 0.0}, {0.0, b}}}; }

struct PhaseSpec {
  double duration = 5.0;
  std::array<double, 2> target{0.0, 0.0};
  double target_radius = 0.05;
  Mat2 Q = diag2(1.0, 1.0);
  double R = 0.1;
  Mat2 Qf = diag2(20.0, 20.0);
  double terminal_bonus = 20.0;

  void validate() const;
};

struct RocketRewardConfig {
  double kappa_a = 5.0;
  double kappa_e = 5.0;
  double kappa_i = 10.0;
  double orbital_weight = 0.1;
  double altitude_weight = 0.1;   // per km gained
  double energy_weight = 0.05;    // per MJ/kg gained
  double guidance_weight = 1.0;
  double smoothness_weight = 0.5;
  double crash_penalty = -500.0;
  double overshoot_penalty = -0.5;
  double overshoot_altitude = 250e3;
  double insertion_bonus = 2000.0;
  double precision_pool = 3200.0;
  double tol_a = 0.05;
  double tol_e = 0.05;
  double tol_angle = 5.0 * orbital::kDeg;
  double pitch_start_altitude = 1e3;
  double pitch_end_altitude = 150e3;

  void validate() const;
};

enum class SystemId { di, vdp, rocket };

struct EnvConfig {
  std::string id = "di";  // di, vdp, di-multi, vdp-multi, rocket
  SystemId system = SystemId::di;
  double dt = 0.1;
  std::vector<PhaseSpec> phases{PhaseSpec{}};
  std::array<double, 2> state_low{-1.0, -1.0};
  std::array<double, 2> state_high{1.0, 1.0};
  double u_max = 4.0;
  double eps = 0.1;
  double failure_penalty = -500.0;

  dynamics::PhysicalConstants constants;
  dynamics::VehicleConfig vehicle;
  dynamics::PhaseSchedule schedule;
  orbital::TargetOrbit target_orbit;
  RocketRewardConfig rocket_reward;
  int rocket_max_steps = 480;

  bool multiphase() const { return phases.size() > 1; }
  int episode_steps() const;
  int obs_dim() const;
  int action_dim() const { return system == SystemId::rocket ? 3 : 1; }
  void validate() const;
};

// Defaults for di, vdp, di-multi, vdp-multi and rocket.
EnvConfig default_env_config(const std::string& id);

const std::vector<std::string>& environment_ids();

}  // namespace gtppo::env
