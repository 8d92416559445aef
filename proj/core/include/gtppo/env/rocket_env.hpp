#pragma once

#include "gtppo/env/environment.hpp"

namespace gtppo::env {

using dynamics::Vec3;

struct InsertionResult {
  bool success = false;
  std::array<double, 5> precision{};  // per element in [0, 1]: a, e, i, raan, argp
  orbital::ElementErrors errors;
};

InsertionResult insertion_check(const orbital::OrbitalElements& el, const orbital::OrbitalElements& target,
                                const RocketRewardConfig& cfg);

// Reference thrust direction of the pitch program at position r: vertical
// below the start altitude, then pitching linearly down to horizontal
// (eastward) at the end altitude.
Vec3 pitch_program_direction(const Vec3& r, const EnvConfig& cfg);

struct RocketRewardInput {
  dynamics::RocketState before;
  dynamics::RocketState after;
  Vec3 u_hat{};
  Vec3 u_prev{};
  bool final_step = false;
};

struct RocketReward {
  double total = 0.0;
  std::map<std::string, double> components;
  bool crashed = false;
  bool inserted = false;
};

RocketReward rocket_reward(const RocketRewardInput& in, const EnvConfig& cfg);

class RocketEnv final : public Environment {
 public:
  explicit RocketEnv(EnvConfig cfg);

  std::vector<double> reset(std::mt19937_64& rng) override;
  StepResult step(std::span<const double> action) override;
  std::vector<double> observation() const override;
  std::vector<double> raw_state() const override;
  int phase() const override;
  const dynamics::RocketState& state() const { return st_; }
  const std::vector<dynamics::StagingEvent>& staging_events() const { return events_; }

 private:
  dynamics::RocketState st_;
  Vec3 u_prev_{};
  bool done_ = false;
  std::vector<dynamics::StagingEvent> events_;
};

}  // namespace gtppo::env
