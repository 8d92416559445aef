#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "gtppo/errors.hpp"

namespace gtppo::ppo {

struct Schedule {
  double initial = 0.0;
  double final = 0.0;
};

// Linear interpolation initial -> final over [0, n].
double anneal(const Schedule& s, int update_index, int n);

struct TrainConfig {
  int updates = 1000;
  int n_envs = 8;
  int worker_steps = 256;  // per environment per update
  int epochs = 8;
  int minibatches = 4;
  int chunk_length = 64;
  double gamma = 0.99;
  double lambda = 0.95;
  double clip = 0.2;
  double vf_coef = 0.2;
  Schedule lr{3e-4, 3e-5};
  Schedule entropy_coef{1e-3, 1e-4};
  double max_grad_norm = 0.5;
  std::uint64_t seed = 1;
  int checkpoint_every = 100;

  void validate() const;
};

TrainConfig default_train_config(const std::string& env_id);

}  // namespace gtppo::ppo
