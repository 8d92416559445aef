#pragma once

#include <span>
#include <vector>

namespace gtppo::ppo {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// delta_t = r_t + gamma V_{t+1} (1 - done_t) - V_t with V_T = bootstrap;
// A_t = delta_t + gamma lambda (1 - done_t) A_{t+1}; returns = A + V.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values, std::span<const unsigned char> dones,
                      double bootstrap_value, double gamma, double lambda);

// In-place (A - mean) / std over the whole batch; returns {mean, std} before.
std::pair<double, double> normalize_advantages(std::vector<double>& advantages);

}  // namespace gtppo::ppo
