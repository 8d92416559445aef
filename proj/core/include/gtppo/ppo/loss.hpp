#pragma once

#include <span>
#include <vector>

#include "gtppo/netcore/tape.hpp"

namespace gtppo::ppo {

struct LossInputs {
  std::span<const double> actions;  // [N * action_dim], unclamped samples
  std::span<const double> old_log_probs;
  std::span<const double> advantages;
  std::span<const double> returns;
  double clip = 0.2;
  double vf_coef = 0.5;
  double entropy_coef = 0.0;
};

struct LossComponents {
  double total = 0.0;
  double policy_loss = 0.0;  // -L^CLIP
  double value_loss = 0.0;
  double entropy = 0.0;
  double mean_ratio = 0.0;
  double max_ratio_deviation = 0.0;  // max |ratio - 1|
  double clip_fraction = 0.0;
};

// Per-sample clipped surrogate min(r A, clip(r, 1-eps, 1+eps) A).
double clipped_surrogate(double ratio, double advantage, double clip);

// total = -mean(min(r A, clip(r) A)) + c1 mean((V - R)^2) - c2 H with a
// diagonal Gaussian policy (log_std clamped to the policy range). Records a
// single scalar node whose backward feeds mean, log_std and value.
template <typename T>
netcore::Var ppo_loss(netcore::BasicTape<T>& tape, netcore::Var mean, netcore::Var log_std, netcore::Var value,
                      const LossInputs& in, LossComponents* components);

extern template netcore::Var ppo_loss<float>(netcore::BasicTape<float>&, netcore::Var, netcore::Var, netcore::Var,
                                             const LossInputs&, LossComponents*);
extern template netcore::Var ppo_loss<double>(netcore::BasicTape<double>&, netcore::Var, netcore::Var, netcore::Var,
                                              const LossInputs&, LossComponents*);

}  // namespace gtppo::ppo
