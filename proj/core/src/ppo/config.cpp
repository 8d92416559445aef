#include "gtppo/ppo/config.hpp"

#include <cmath>

namespace gtppo::ppo {

double anneal(const Schedule& s, int update_index, int n) {
  if (n <= 0) return s.initial;
  const double f = std::clamp(static_cast<double>(update_index) / n, 0.0, 1.0);
  return s.initial + (s.final - s.initial) * f;
}

void TrainConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string("ppo.") + name + " must be positive");
  };
  auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string("ppo.") + name + " must lie in [0, 1]");
  };
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(std::string("ppo.") + name + " must be non-negative");
  };
  positive(updates, "updates");
  positive(n_envs, "n_envs");
  positive(worker_steps, "worker_steps");
  positive(epochs, "epochs");
  positive(minibatches, "minibatches");
  positive(chunk_length, "chunk_length");
  unit(gamma, "gamma");
  unit(lambda, "lambda");
  positive(clip, "clip");
  if (clip >= 1.0) throw ConfigError("ppo.clip must be below 1");
  non_negative(vf_coef, "vf_coef");
  positive(lr.initial, "lr.initial");
  positive(lr.final, "lr.final");
  non_negative(entropy_coef.initial, "entropy_coef.initial");
  non_negative(entropy_coef.final, "entropy_coef.final");
  positive(max_grad_norm, "max_grad_norm");
  positive(checkpoint_every, "checkpoint_every");
}

TrainConfig default_train_config(const std::string& env_id) {
  TrainConfig c;
  if (env_id == "di" || env_id == "di-multi") {
    c.worker_steps = 256;
    c.epochs = 8;
    c.vf_coef = 0.2;
  } else if (env_id == "vdp" || env_id == "vdp-multi") {
    c.worker_steps = 512;
    c.epochs = 10;
    c.vf_coef = 0.2;
  } else if (env_id == "rocket") {
    c.updates = 5000;
    c.n_envs = 16;
    c.worker_steps = 480;
    c.epochs = 16;
    c.clip = 0.12;
    c.vf_coef = 0.8;
    c.lr = {1e-4, 5e-6};
  } else {
    throw ConfigError("unknown environment id '" + env_id + "'");
  }
  return c;
}

}  // namespace gtppo::ppo
