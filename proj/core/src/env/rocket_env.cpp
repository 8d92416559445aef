#include "gtppo/env/rocket_env.hpp"

#include <algorithm>
#include <cmath>

namespace gtppo::env {

using dynamics::cross;
using dynamics::dot;
using dynamics::norm;
using dynamics::operator*;
using dynamics::operator+;
using dynamics::operator-;

InsertionResult insertion_check(const orbital::OrbitalElements& el, const orbital::OrbitalElements& target,
                                const RocketRewardConfig& cfg) {
  InsertionResult out;
  out.errors = orbital::element_errors(el, target);
  const auto& e = out.errors;
  const std::array<double, 5> err{e.a, e.e, e.i, e.raan, e.argp};
  const std::array<double, 5> tol{cfg.tol_a, cfg.tol_e, cfg.tol_angle, cfg.tol_angle, cfg.tol_angle};
  out.success = true;
  for (int j = 0; j < 5; ++j) {
    out.success = out.success && err[j] <= tol[j];
    out.precision[j] = std::clamp(1.0 - err[j] / tol[j], 0.0, 1.0);
  }
  return out;
}

Vec3 pitch_program_direction(const Vec3& r, const EnvConfig& cfg) {
  const auto& rc = cfg.rocket_reward;
  const double rn = norm(r);
  const Vec3 up = (1.0 / rn) * r;
  Vec3 east = cross(Vec3{0.0, 0.0, 1.0}, up);
  const double en = norm(east);
  east = en > 1e-12 ? (1.0 / en) * east : Vec3{0.0, 1.0, 0.0};
  const double h = rn - cfg.constants.R_e;
  const double frac = std::clamp((h - rc.pitch_start_altitude) / (rc.pitch_end_altitude - rc.pitch_start_altitude), 0.0, 1.0);
  const double pitch = 0.5 * orbital::kPi * (1.0 - frac);
  return std::sin(pitch) * up + std::cos(pitch) * east;
}

RocketReward rocket_reward(const RocketRewardInput& in, const EnvConfig& cfg) {
  const auto& rc = cfg.rocket_reward;
  const auto& c = cfg.constants;
  RocketReward out;
  const double h0 = norm(in.before.r) - c.R_e;
  const double h1 = norm(in.after.r) - c.R_e;
  const double e0 = 0.5 * dot(in.before.v, in.before.v) - c.mu / norm(in.before.r);
  const double e1 = 0.5 * dot(in.after.v, in.after.v) - c.mu / norm(in.after.r);

  double orbital_term = 0.0;
  const auto el = orbital::state_to_elements(in.after.r, in.after.v, c.mu);
  const bool elements_ok = el.ok() && h1 >= 0.0;
  if (elements_ok) {
    const auto err = orbital::element_errors(el.elements, cfg.target_orbit);
    orbital_term = rc.orbital_weight *
                   (std::exp(-rc.kappa_a * err.a) + std::exp(-rc.kappa_e * err.e) + std::exp(-rc.kappa_i * err.i));
  }
  const double trajectory = rc.altitude_weight * (h1 - h0) / 1e3 + rc.energy_weight * (e1 - e0) / 1e6;
  const double guidance = rc.guidance_weight * dot(in.u_hat, pitch_program_direction(in.before.r, cfg));
  const double smoothness = -rc.smoothness_weight * norm(in.u_hat - in.u_prev);
  out.crashed = h1 < 0.0;
  const double crash = out.crashed ? rc.crash_penalty : 0.0;
  const double overshoot = h1 > rc.overshoot_altitude ? rc.overshoot_penalty : 0.0;

  double terminal = 0.0;
  if (in.final_step && !out.crashed && elements_ok) {
    const auto ins = insertion_check(el.elements, cfg.target_orbit, rc);
    if (ins.success) {
      out.inserted = true;
      double score = 0.0;
      for (double p : ins.precision) score += p;
      terminal = rc.insertion_bonus + rc.precision_pool * score / 5.0;
    }
  }
  out.components = {{"orbital", orbital_term}, {"trajectory", trajectory}, {"guidance", guidance},
                    {"smoothness", smoothness}, {"crash", crash},         {"overshoot", overshoot},
                    {"terminal", terminal}};
  out.total = orbital_term + trajectory + guidance + smoothness + crash + overshoot + terminal;
  return out;
}

RocketEnv::RocketEnv(EnvConfig cfg) : Environment(std::move(cfg)) {
  if (cfg_.system != SystemId::rocket) throw ConfigError("RocketEnv requires the rocket system");
  std::mt19937_64 unused(0);
  reset(unused);
}

std::vector<double> RocketEnv::reset(std::mt19937_64&) {
  st_ = dynamics::launch_state(cfg_.vehicle, cfg_.schedule, cfg_.constants);
  u_prev_ = (1.0 / norm(st_.r)) * st_.r;
  k_ = 0;
  done_ = false;
  events_.clear();
  return observation();
}

std::vector<double> RocketEnv::observation() const {
  const auto& c = cfg_.constants;
  const double vs = std::sqrt(c.mu / c.R_e);
  const double horizon = cfg_.schedule.horizon();
  return {st_.r[0] / c.R_e,
          st_.r[1] / c.R_e,
          st_.r[2] / c.R_e,
          st_.v[0] / vs,
          st_.v[1] / vs,
          st_.v[2] / vs,
          st_.m / cfg_.vehicle.initial_mass(),
          std::clamp(1.0 - st_.t / horizon, 0.0, 1.0),
          static_cast<double>(phase())};
}

std::vector<double> RocketEnv::raw_state() const {
  return {st_.r[0], st_.r[1], st_.r[2], st_.v[0], st_.v[1], st_.v[2], st_.m};
}

int RocketEnv::phase() const { return cfg_.schedule.phase_at(std::min(st_.t, cfg_.schedule.horizon())); }

StepResult RocketEnv::step(std::span<const double> action) {
  if (action.size() != 3) throw ConfigError("rocket environment takes a 3-vector action");
  for (double a : action) {
    if (!std::isfinite(a)) throw ConfigError("non-finite action");
  }
  if (done_) throw ConfigError("step called on a finished episode");
  const Vec3 a{action[0], action[1], action[2]};
  const double an = norm(a);
  const Vec3 u_hat = an > 1e-12 ? (1.0 / an) * a : u_prev_;

  StepResult out;
  out.info.phase = phase();
  out.info.applied_action = {u_hat[0], u_hat[1], u_hat[2]};
  RocketRewardInput in;
  in.before = st_;
  in.u_hat = u_hat;
  in.u_prev = u_prev_;
  try {
    auto ev = dynamics::propagate_rocket(st_, u_hat, cfg_.dt, cfg_.vehicle, cfg_.schedule, cfg_.constants);
    events_.insert(events_.end(), ev.begin(), ev.end());
  } catch (const IntegrationError&) {
    done_ = true;
    ++k_;
    out.reward = cfg_.failure_penalty;
    out.done = true;
    out.info.components = {{"failure", cfg_.failure_penalty}};
    out.info.state = raw_state();
    out.observation = observation();
    return out;
  }
  ++k_;
  in.after = st_;
  in.final_step = k_ == cfg_.rocket_max_steps;
  const RocketReward r = rocket_reward(in, cfg_);
  u_prev_ = u_hat;
  done_ = r.crashed || in.final_step;
  out.reward = r.total;
  out.done = done_;
  out.info.components = r.components;
  out.info.success = r.inserted;
  out.info.state = raw_state();
  out.observation = observation();
  return out;
}

}  // namespace gtppo::env
