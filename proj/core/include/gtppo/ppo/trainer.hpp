#pragma once

#include <functional>
#include <optional>

#include "gtppo/netcore/optim.hpp"
#include "gtppo/ppo/config.hpp"
#include "gtppo/ppo/loss.hpp"
#include "gtppo/ppo/rollout.hpp"

namespace gtppo::ppo {

struct UpdateMetrics {
  int update = 0;  // 1-based
  double mean_reward = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double total_loss = 0.0;
  double lr = 0.0;
  double entropy_coef = 0.0;
  long steps_collected = 0;
  double elapsed_s = 0.0;  // cumulative simulated environment time
  int episodes = 0;
  double success_rate = 0.0;
};

// Builds the training batch for a set of chunks.
gtrxl::SequenceBatch<float> chunk_batch(const RolloutBuffer& buf, std::span<const int> chunk_ids, int n_blocks);

class Trainer {
 public:
  Trainer(TrainConfig cfg, env::EnvConfig env_cfg, gtrxl::GTrXLConfig model_cfg);

  gtrxl::Model<float>& model() { return model_; }
  const TrainConfig& config() const { return cfg_; }
  int completed_updates() const { return update_; }

  // One collect / advantage / optimize cycle. Throws DivergenceError on a
  // non-finite loss or gradient after restoring the parameters held before the update.
  UpdateMetrics run_update();

  // Runs the remaining updates, calling `on_update` after each.
  void train(const std::function<void(const UpdateMetrics&, const gtrxl::Model<float>&)>& on_update);

 private:
  TrainConfig cfg_;
  env::EnvConfig env_cfg_;
  gtrxl::Model<float> model_;
  VectorEnv envs_;
  netcore::Adam adam_;
  std::mt19937_64 shuffle_rng_;
  int update_ = 0;
  double sim_time_ = 0.0;
};

}  // namespace gtppo::ppo
