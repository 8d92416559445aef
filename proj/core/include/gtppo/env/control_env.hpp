#pragma once

#include "gtppo/dynamics/systems.hpp"
#include "gtppo/env/environment.hpp"

namespace gtppo::env {

using dynamics::State2;

// Stage reward -(e'Qe + R u^2) with e = x - target; when `terminal`, the
// phase-end reward -e'Qf e + B 1{|e| <= r} instead (u unused).
double quadratic_reward(const State2& x, double u, const PhaseSpec& spec, bool terminal);

double running_cost(const State2& x, double u, const PhaseSpec& spec);
double terminal_cost(const State2& x, const PhaseSpec& spec);
bool in_target_region(const State2& x, const PhaseSpec& spec);

// Linear ramp from prev to next over the first steps of a phase: weight k/5
// on next, next exactly from k = 5 on.
std::array<double, 2> blend_target(const std::array<double, 2>& prev, const std::array<double, 2>& next, int k);

// Double integrator and Van der Pol, single- or multi-phase.
class ControlEnv final : public Environment {
 public:
  explicit ControlEnv(EnvConfig cfg);

  std::vector<double> reset(std::mt19937_64& rng) override;
  std::vector<double> reset_to(const State2& x0);
  StepResult step(std::span<const double> action) override;
  std::vector<double> observation() const override;
  std::vector<double> raw_state() const override { return {x_[0], x_[1]}; }
  int phase() const override { return phase_; }
  const State2& state() const { return x_; }

  State2 advance(const State2& x, double u) const;

 private:
  std::vector<int> phase_steps_;
  State2 x_{};
  int phase_ = 0;
  int k_in_phase_ = 0;
  int total_ = 0;
};

}  // namespace gtppo::env
