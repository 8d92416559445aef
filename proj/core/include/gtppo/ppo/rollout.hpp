#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "gtppo/env/environment.hpp"
#include "gtppo/gtrxl/model.hpp"

namespace gtppo::ppo {

// Contiguous run of steps of one environment that starts at an episode start
// or after `chunk_length` steps, with the memory window as it was before the
// first step.
struct Chunk {
  int env = 0;
  int start = 0;
  int length = 0;
  std::vector<netcore::Tensor> memory;  // per block [memory_length, d_embed]
};

struct RolloutBuffer {
  int n_envs = 0;
  int steps = 0;
  int obs_dim = 0;
  int action_dim = 0;
  // Row index = env * steps + t.
  std::vector<float> observations;
  std::vector<double> actions;
  std::vector<double> log_probs;
  std::vector<double> values;
  std::vector<double> rewards;
  std::vector<unsigned char> dones;
  std::vector<double> bootstrap_values;  // per env, V of the state after the last step
  std::vector<double> advantages;
  std::vector<double> returns;
  std::vector<Chunk> chunks;
  std::vector<double> episode_returns;  // completed episodes
  std::vector<double> partial_returns;  // unfinished episode per env at the end
  int successes = 0;
  double simulated_seconds = 0.0;

  std::size_t index(int env, int t) const { return static_cast<std::size_t>(env) * steps + t; }
  int completed_episodes() const { return static_cast<int>(episode_returns.size()); }
  // Mean return of completed episodes, or of partial episodes if none ended.
  double mean_episode_return() const;
};

// Holds E environments, their memory windows and per-environment RNG streams.
class VectorEnv {
 public:
  VectorEnv(const env::EnvConfig& cfg, int n_envs, std::uint64_t seed);

  int size() const { return static_cast<int>(envs_.size()); }
  env::Environment& at(int i) { return *envs_[i]; }
  std::mt19937_64& rng(int i) { return rngs_[i]; }

  // Resets every environment and window (start of a collection).
  void reset_all(const gtrxl::Model<float>& model);

  // Steps every environment `steps` times with actions sampled from the
  // model; finished episodes auto-reset with fresh memory noise.
  RolloutBuffer collect(const gtrxl::Model<float>& model, int steps, int chunk_length);

 private:
  std::vector<std::unique_ptr<env::Environment>> envs_;
  std::vector<std::mt19937_64> rngs_;
  std::vector<gtrxl::MemoryWindow<float>> windows_;
  std::vector<std::vector<double>> obs_;
};

void compute_advantages(RolloutBuffer& buf, double gamma, double lambda);

}  // namespace gtppo::ppo
