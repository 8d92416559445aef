#include "gtppo/ppo/loss.hpp"

#include <algorithm>
#include <cmath>

#include "gtppo/gtrxl/policy.hpp"

namespace gtppo::ppo {

using netcore::BasicTape;
using netcore::BasicTensor;
using netcore::Var;

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;
}

double clipped_surrogate(double ratio, double advantage, double clip) {
  return std::min(ratio * advantage, std::clamp(ratio, 1.0 - clip, 1.0 + clip) * advantage);
}

template <typename T>
Var ppo_loss(BasicTape<T>& tape, Var mean, Var log_std, Var value, const LossInputs& in, LossComponents* components) {
  const auto& mu = tape.value(mean);
  const auto& ls_raw = tape.value(log_std);
  const auto& v = tape.value(value);
  const int n = mu.rows();
  const int a = mu.cols();
  if (static_cast<int>(ls_raw.size()) != a || static_cast<int>(v.size()) != n ||
      static_cast<int>(in.actions.size()) != n * a || static_cast<int>(in.old_log_probs.size()) != n ||
      static_cast<int>(in.advantages.size()) != n || static_cast<int>(in.returns.size()) != n) {
    throw ConfigError("ppo_loss: input size mismatch for " + std::to_string(n) + " samples");
  }
  if (n == 0) throw ConfigError("ppo_loss: empty batch");

  std::vector<double> ls(a), inv_sigma(a);
  std::vector<bool> inside(a);
  for (int j = 0; j < a; ++j) {
    ls[j] = gtrxl::clamp_log_std(ls_raw[j]);
    inside[j] = ls_raw[j] > gtrxl::kLogStdMin && ls_raw[j] < gtrxl::kLogStdMax;
    inv_sigma[j] = std::exp(-ls[j]);
  }

  const double inv_n = 1.0 / n;
  std::vector<double> d_mu(static_cast<std::size_t>(n) * a, 0.0), d_ls(a, 0.0), d_v(n, 0.0);
  double surrogate = 0.0, value_loss = 0.0, ratio_sum = 0.0, max_dev = 0.0;
  int clipped = 0;
  std::vector<double> z(a);
  for (int i = 0; i < n; ++i) {
    double logp = 0.0;
    for (int j = 0; j < a; ++j) {
      z[j] = (in.actions[static_cast<std::size_t>(i) * a + j] - static_cast<double>(mu.at(i, j))) * inv_sigma[j];
      logp -= 0.5 * z[j] * z[j] + ls[j] + kHalfLog2Pi;
    }
    const double ratio = std::exp(logp - in.old_log_probs[i]);
    const double adv = in.advantages[i];
    const double unclipped = ratio * adv;
    const double clipped_term = std::clamp(ratio, 1.0 - in.clip, 1.0 + in.clip) * adv;
    surrogate += std::min(unclipped, clipped_term);
    ratio_sum += ratio;
    max_dev = std::max(max_dev, std::fabs(ratio - 1.0));
    if (std::fabs(ratio - 1.0) > in.clip) ++clipped;
    // d(-min)/dlogp; the clipped branch is constant in ratio outside the band.
    const double d_logp = unclipped <= clipped_term ? -adv * ratio * inv_n : 0.0;
    if (d_logp != 0.0) {
      for (int j = 0; j < a; ++j) {
        d_mu[static_cast<std::size_t>(i) * a + j] = d_logp * z[j] * inv_sigma[j];
        if (inside[j]) d_ls[j] += d_logp * (z[j] * z[j] - 1.0);
      }
    }
    const double err = static_cast<double>(v[i]) - in.returns[i];
    value_loss += err * err;
    d_v[i] = in.vf_coef * 2.0 * err * inv_n;
  }
  double entropy = 0.0;
  for (int j = 0; j < a; ++j) {
    entropy += ls[j] + kHalfLog2Pi + 0.5;
    if (inside[j]) d_ls[j] -= in.entropy_coef;
  }
  const double policy_loss = -surrogate * inv_n;
  value_loss *= inv_n;
  const double total = policy_loss + in.vf_coef * value_loss - in.entropy_coef * entropy;

  if (components != nullptr) {
    components->total = total;
    components->policy_loss = policy_loss;
    components->value_loss = value_loss;
    components->entropy = entropy;
    components->mean_ratio = ratio_sum * inv_n;
    components->max_ratio_deviation = max_dev;
    components->clip_fraction = clipped * inv_n;
  }

  return tape.record(BasicTensor<T>({1}, {static_cast<T>(total)}), {mean, log_std, value},
                     [mean, log_std, value, d_mu = std::move(d_mu), d_ls = std::move(d_ls), d_v = std::move(d_v)](
                         BasicTape<T>& t, Var out) {
                       const double g = t.grad(out)[0];
                       if (t.requires_grad(mean)) {
                         auto& gm = t.grad(mean);
                         for (std::size_t k = 0; k < d_mu.size(); ++k) gm[k] += static_cast<T>(g * d_mu[k]);
                       }
                       if (t.requires_grad(log_std)) {
                         auto& gl = t.grad(log_std);
                         for (std::size_t k = 0; k < d_ls.size(); ++k) gl[k] += static_cast<T>(g * d_ls[k]);
                       }
                       if (t.requires_grad(value)) {
                         auto& gv = t.grad(value);
                         for (std::size_t k = 0; k < d_v.size(); ++k) gv[k] += static_cast<T>(g * d_v[k]);
                       }
                     });
}

template Var ppo_loss<float>(BasicTape<float>&, Var, Var, Var, const LossInputs&, LossComponents*);
template Var ppo_loss<double>(BasicTape<double>&, Var, Var, Var, const LossInputs&, LossComponents*);

}  // namespace gtppo::ppo
