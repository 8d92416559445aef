#include "gtppo/env/control_env.hpp"

#include <algorithm>
#include <cmath>

namespace gtppo::env {

namespace {
double quad(const Mat2& m, double e0, double e1) {
  return e0 * (m[0][0] * e0 + m[0][1] * e1) + e1 * (m[1][0] * e0 + m[1][1] * e1);
}
}  // namespace

double running_cost(const State2& x, double u, const PhaseSpec& spec) {
  return quad(spec.Q, x[0] - spec.target[0], x[1] - spec.target[1]) + spec.R * u * u;
}

double terminal_cost(const State2& x, const PhaseSpec& spec) {
  return quad(spec.Qf, x[0] - spec.target[0], x[1] - spec.target[1]);
}

bool in_target_region(const State2& x, const PhaseSpec& spec) {
  return std::hypot(x[0] - spec.target[0], x[1] - spec.target[1]) <= spec.target_radius;
}

double quadratic_reward(const State2& x, double u, const PhaseSpec& spec, bool terminal) {
  if (!terminal) return -running_cost(x, u, spec);
  return -terminal_cost(x, spec) + (in_target_region(x, spec) ? spec.terminal_bonus : 0.0);
}

std::array<double, 2> blend_target(const std::array<double, 2>& prev, const std::array<double, 2>& next, int k) {
  if (k < 0) throw ConfigError("blend_target: negative step index");
  if (k >= 5) return next;
  const double w = k / 5.0;
  return {prev[0] + w * (next[0] - prev[0]), prev[1] + w * (next[1] - prev[1])};
}

ControlEnv::ControlEnv(EnvConfig cfg) : Environment(std::move(cfg)) {
  if (cfg_.system == SystemId::rocket) throw ConfigError("ControlEnv does not simulate the rocket");
  for (const auto& p : cfg_.phases) phase_steps_.push_back(static_cast<int>(std::lround(p.duration / cfg_.dt)));
  total_ = cfg_.episode_steps();
}

std::vector<double> ControlEnv::reset(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u0(cfg_.state_low[0], cfg_.state_high[0]);
  std::uniform_real_distribution<double> u1(cfg_.state_low[1], cfg_.state_high[1]);
  const double a = u0(rng);
  const double b = u1(rng);
  return reset_to({a, b});
}

std::vector<double> ControlEnv::reset_to(const State2& x0) {
  x_ = x0;
  k_ = 0;
  phase_ = 0;
  k_in_phase_ = 0;
  return observation();
}

State2 ControlEnv::advance(const State2& x, double u) const {
  return cfg_.system == SystemId::di ? dynamics::di_step(x, u, cfg_.dt) : dynamics::vdp_step(x, u, cfg_.eps, cfg_.dt);
}

std::vector<double> ControlEnv::observation() const {
  if (!cfg_.multiphase()) return {x_[0], x_[1]};
  const int p = std::min(phase_, static_cast<int>(cfg_.phases.size()) - 1);
  const auto& next = cfg_.phases[p].target;
  const auto& prev = p == 0 ? next : cfg_.phases[p - 1].target;
  const auto tgt = blend_target(prev, next, k_in_phase_);
  return {x_[0], x_[1], tgt[0], tgt[1], static_cast<double>(k_) / total_, static_cast<double>(p)};
}

StepResult ControlEnv::step(std::span<const double> action) {
  if (action.size() != 1) throw ConfigError("control environments take a single action");
  if (!std::isfinite(action[0])) throw ConfigError("non-finite action");
  if (k_ >= total_) throw ConfigError("step called on a finished episode");
  const double u = std::clamp(action[0], -cfg_.u_max, cfg_.u_max);
  const PhaseSpec& spec = cfg_.phases[phase_];

  StepResult out;
  out.info.phase = phase_;
  out.info.applied_action = {u};
  const double run = quadratic_reward(x_, u, spec, false);
  double terminal = 0.0, bonus = 0.0;
  State2 next;
  try {
    next = advance(x_, u);
  } catch (const IntegrationError&) {
    k_ = total_;
    out.reward = cfg_.failure_penalty;
    out.done = true;
    out.info.components = {{"running", 0.0}, {"terminal", 0.0}, {"bonus", 0.0}, {"failure", cfg_.failure_penalty}};
    out.info.state = raw_state();
    out.observation = observation();
    return out;
  }
  x_ = next;
  ++k_;
  ++k_in_phase_;
  if (k_in_phase_ == phase_steps_[phase_]) {
    terminal = -terminal_cost(x_, spec);
    const bool hit = in_target_region(x_, spec);
    bonus = hit ? spec.terminal_bonus : 0.0;
    if (phase_ + 1 < static_cast<int>(cfg_.phases.size())) {
      ++phase_;
      k_in_phase_ = 0;
    } else {
      out.info.success = hit;
    }
  }
  out.reward = run + terminal + bonus;
  out.done = k_ == total_;
  out.info.components = {{"running", run}, {"terminal", terminal}, {"bonus", bonus}, {"failure", 0.0}};
  out.info.state = raw_state();
  out.observation = observation();
  return out;
}

}  // namespace gtppo::env
