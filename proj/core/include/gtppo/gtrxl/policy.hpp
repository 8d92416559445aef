#pragma once

#include <random>
#include <span>
#include <vector>

#include "gtppo/gtrxl/model.hpp"

namespace gtppo::gtrxl {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

double clamp_log_std(double log_std);

// Diagonal Gaussian with state-independent log standard deviation.
struct GaussianPolicy {
  std::vector<double> mean;
  std::vector<double> log_std;  // clamped on construction

  GaussianPolicy(std::span<const float> mean, std::span<const float> log_std);
  GaussianPolicy(std::vector<double> mean, std::vector<double> log_std);

  double log_prob(std::span<const double> action) const;
  double entropy() const;
};

struct SampledAction {
  std::vector<double> action;
  double log_prob = 0.0;
};

SampledAction sample_action(const GaussianPolicy& p, std::mt19937_64& rng);

// Closed-form entropy of a diagonal Gaussian: sum(log sigma + 0.5 log(2 pi e)).
double gaussian_entropy(std::span<const double> log_std);

struct ActionEvaluation {
  std::vector<double> log_probs;
  std::vector<double> values;
  double entropy = 0.0;
};

// Recomputes log-probabilities, values and entropy for stored actions over a
// sequence batch (memory snapshots taken at collection time).
ActionEvaluation evaluate_actions(Model<float>& model, const SequenceBatch<float>& batch,
                                  std::span<const double> actions);

}  // namespace gtppo::gtrxl
