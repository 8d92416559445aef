#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gtppo/baselines/compare.hpp"
#include "gtppo/env/rocket_env.hpp"
#include "gtppo/gtrxl/model.hpp"
#include "gtppo/io/config.hpp"

namespace gtppo::io {

// Deterministic controller: maps an observation to an action.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual void reset(std::uint64_t episode_seed) = 0;
  virtual std::vector<double> act(const env::Environment& env, const std::vector<double>& obs) = 0;
};

// Mean action of the policy, memory noise drawn from the episode seed.
class PolicyController final : public Controller {
 public:
  explicit PolicyController(const gtrxl::Model<float>& model);
  void reset(std::uint64_t episode_seed) override;
  std::vector<double> act(const env::Environment& env, const std::vector<double>& obs) override;

 private:
  const gtrxl::Model<float>& model_;
  gtrxl::MemoryWindow<float> window_;
};

// Clamped finite-horizon LQR on the double integrator.
class LqrController final : public Controller {
 public:
  explicit LqrController(const env::EnvConfig& cfg);
  void reset(std::uint64_t) override {}
  std::vector<double> act(const env::Environment& env, const std::vector<double>& obs) override;

 private:
  std::vector<std::array<double, 2>> K_;
};

// Scripted pitch-program thrust direction for the rocket.
class PitchProgramController final : public Controller {
 public:
  void reset(std::uint64_t) override {}
  std::vector<double> act(const env::Environment& env, const std::vector<double>& obs) override;
};

struct EpisodeLog {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  double total_reward = 0.0;
  double cost = 0.0;  // control environments: stage plus terminal costs
  bool success = false;
  std::vector<double> phase_end_errors;  // control environments: distance to each phase target at its end
  Json rocket;                           // rocket: final elements, errors, altitude, staging events
};

// Runs one episode from the environment's current state.
EpisodeLog run_episode(env::Environment& env, Controller& ctl, const std::vector<double>& first_obs);

struct EvalReport {
  std::vector<EpisodeLog> episodes;
  Json summary;
};

// Control environments start from the seeded comparison initial states;
// the rocket starts from the launch state.
EvalReport evaluate(const env::EnvConfig& cfg, Controller& ctl, int n_episodes, std::uint64_t seed);

std::string episode_csv(const EpisodeLog& ep);

// Policy rollout in the form used by the comparison harness.
baselines::PolicyRollout policy_rollout(const gtrxl::Model<float>& model, const env::EnvConfig& cfg, std::uint64_t seed);

std::string compare_csv(const baselines::CompareReport& rep);
Json compare_summary_json(const baselines::CompareReport& rep);

}  // namespace gtppo::io
