#include "gtppo/ppo/gae.hpp"

#include <cmath>

#include "gtppo/errors.hpp"

namespace gtppo::ppo {

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values, std::span<const unsigned char> dones,
                      double bootstrap_value, double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) throw ConfigError("compute_gae: length mismatch");
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_value = bootstrap_value;
  double next_adv = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double live = dones[k] ? 0.0 : 1.0;
    const double delta = rewards[k] + gamma * next_value * live - values[k];
    next_adv = delta + gamma * lambda * live * next_adv;
    out.advantages[k] = next_adv;
    out.returns[k] = next_adv + values[k];
    next_value = values[k];
  }
  return out;
}

std::pair<double, double> normalize_advantages(std::vector<double>& advantages) {
  if (advantages.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double a : advantages) mean += a;
  mean /= advantages.size();
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  var /= advantages.size();
  const double sd = std::sqrt(var);
  for (double& a : advantages) a = (a - mean) / (sd + 1e-8);
  return {mean, sd};
}

}  // namespace gtppo::ppo
