#pragma once

#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gtppo/env/config.hpp"

namespace gtppo::env {

struct StepInfo {
  int phase = 0;
  std::vector<double> state;           // raw physical state after the step
  std::vector<double> applied_action;  // control after clamping / normalization
  std::map<std::string, double> components;
  bool success = false;  // terminal-region or insertion success, set on the final step
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

class Environment {
 public:
  virtual ~Environment() = default;

  const EnvConfig& config() const { return cfg_; }
  int obs_dim() const { return cfg_.obs_dim(); }
  int action_dim() const { return cfg_.action_dim(); }
  int max_steps() const { return cfg_.episode_steps(); }

  virtual std::vector<double> reset(std::mt19937_64& rng) = 0;
  virtual StepResult step(std::span<const double> action) = 0;
  virtual std::vector<double> observation() const = 0;
  virtual std::vector<double> raw_state() const = 0;
  virtual int phase() const = 0;
  int steps_taken() const { return k_; }
  double time() const { return k_ * cfg_.dt; }

 protected:
  explicit Environment(EnvConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }
  EnvConfig cfg_;
  int k_ = 0;
};

std::unique_ptr<Environment> make_environment(const EnvConfig& cfg);

}  // namespace gtppo::env
