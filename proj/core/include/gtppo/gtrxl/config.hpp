#pragma once

#include <string>

#include "gtppo/errors.hpp"

namespace gtppo::gtrxl {

struct GTrXLConfig {
  int n_blocks = 3;
  int d_embed = 128;
  int n_heads = 2;
  int memory_length = 32;
  int mlp_dim = 128;
  int hidden_dim = 128;  // encoder MLP width
  int action_dim = 1;
  int obs_dim = 2;
  double gate_bias_init = 2.0;
  double memory_noise = 0.01;
  double init_log_std = 0.0;

  void validate() const {
    auto positive = [](int v, const char* name) {
      if (v <= 0) throw ConfigError(std::string("model.") + name + " must be positive");
    };
    positive(n_blocks, "n_blocks");
    positive(d_embed, "d_embed");
    positive(n_heads, "n_heads");
    positive(memory_length, "memory_length");
    positive(mlp_dim, "mlp_dim");
    positive(hidden_dim, "hidden_dim");
    positive(action_dim, "action_dim");
    positive(obs_dim, "obs_dim");
    if (d_embed % n_heads != 0) {
      throw ConfigError("model.d_embed (" + std::to_string(d_embed) + ") must be divisible by model.n_heads (" +
                        std::to_string(n_heads) + ")");
    }
    if (memory_noise < 0.0) throw ConfigError("model.memory_noise must be non-negative");
  }
};

}  // namespace gtppo::gtrxl
