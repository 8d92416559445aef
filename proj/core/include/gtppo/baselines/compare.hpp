#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gtppo/baselines/shooting.hpp"

namespace gtppo::baselines {

struct CompareCase {
  int id = 0;
  State2 x0{};
  double policy_cost = 0.0;
  double baseline_cost = 0.0;
  double ratio = 0.0;
  bool success = false;      // policy ends inside the terminal region
  bool baseline_ok = true;   // false: excluded from the summary
  std::string note;
};

struct CompareSummary {
  int n_cases = 0;
  int n_included = 0;
  int successes = 0;
  double mean_ratio = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

struct CompareReport {
  std::string env_id;
  std::string baseline;
  std::vector<CompareCase> cases;
  CompareSummary summary;
};

using PolicyRollout = std::function<Trajectory(const State2& x0)>;

// Initial states drawn uniformly from the environment's state bounds.
std::vector<State2> sample_initial_states(const env::EnvConfig& cfg, int n, std::uint64_t seed);

// Clamped LQR for the double integrator, multi-restart shooting for Van der Pol.
std::string baseline_name(const env::EnvConfig& cfg);
Trajectory baseline_rollout(const env::EnvConfig& cfg, const State2& x0, const ShootingOptions& opt = {});

CompareReport compare(const env::EnvConfig& cfg, const PolicyRollout& policy, int n_cases, std::uint64_t seed,
                      const ShootingOptions& opt = {});

CompareSummary summarize(const std::vector<CompareCase>& cases);

}  // namespace gtppo::baselines
