#include "gtppo/gtrxl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gtppo::gtrxl {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)
}

double clamp_log_std(double log_std) { return std::clamp(log_std, kLogStdMin, kLogStdMax); }

GaussianPolicy::GaussianPolicy(std::span<const float> m, std::span<const float> ls)
    : mean(m.begin(), m.end()), log_std(ls.begin(), ls.end()) {
  if (mean.size() != log_std.size()) throw ConfigError("policy mean/log_std length mismatch");
  for (auto& v : log_std) v = clamp_log_std(v);
}

GaussianPolicy::GaussianPolicy(std::vector<double> m, std::vector<double> ls) : mean(std::move(m)), log_std(std::move(ls)) {
  if (mean.size() != log_std.size()) throw ConfigError("policy mean/log_std length mismatch");
  for (auto& v : log_std) v = clamp_log_std(v);
}

double GaussianPolicy::log_prob(std::span<const double> action) const {
  if (action.size() != mean.size()) throw ConfigError("action dimension mismatch");
  double lp = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double z = (action[i] - mean[i]) * std::exp(-log_std[i]);
    lp -= 0.5 * z * z + log_std[i] + kHalfLog2Pi;
  }
  return lp;
}

double GaussianPolicy::entropy() const { return gaussian_entropy(log_std); }

double gaussian_entropy(std::span<const double> log_std) {
  double h = 0.0;
  for (double ls : log_std) h += clamp_log_std(ls) + kHalfLog2Pi + 0.5;
  return h;
}

SampledAction sample_action(const GaussianPolicy& p, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  SampledAction out;
  out.action.resize(p.mean.size());
  for (std::size_t i = 0; i < p.mean.size(); ++i) out.action[i] = p.mean[i] + std::exp(p.log_std[i]) * n01(rng);
  out.log_prob = p.log_prob(out.action);
  return out;
}

ActionEvaluation evaluate_actions(Model<float>& model, const SequenceBatch<float>& batch, std::span<const double> actions) {
  const int n = batch.obs.rows();
  const int a = model.config().action_dim;
  if (static_cast<int>(actions.size()) != n * a) {
    throw ConfigError("evaluate_actions: " + std::to_string(actions.size() / std::max(a, 1)) + " actions for " +
                      std::to_string(n) + " observations");
  }
  netcore::Tape tape(false);
  auto out = model.forward(tape, batch);
  const auto& mean = tape.value(out.mean);
  const auto& value = tape.value(out.value);
  const auto& ls = tape.value(out.log_std);
  ActionEvaluation ev;
  ev.log_probs.resize(n);
  ev.values.resize(n);
  for (int i = 0; i < n; ++i) {
    GaussianPolicy p(mean.row(i), ls.row(0));
    ev.log_probs[i] = p.log_prob(actions.subspan(static_cast<std::size_t>(i) * a, a));
    ev.values[i] = value[i];
  }
  GaussianPolicy p0(mean.row(0), ls.row(0));
  ev.entropy = p0.entropy();
  return ev;
}

}  // namespace gtppo::gtrxl
