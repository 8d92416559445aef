#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gtppo/gtrxl/config.hpp"
#include "gtppo/gtrxl/memory.hpp"
#include "gtppo/netcore/ops.hpp"
#include "gtppo/netcore/parameter_store.hpp"

namespace gtppo::gtrxl {

// Token rows grouped into segments, each preceded by a frozen memory snapshot
// (one [memory_length, d_embed] tensor per block). Memory is a constant: no
// gradient flows into snapshot contents.
template <typename T>
struct SequenceBatch {
  netcore::BasicTensor<T> obs;  // [N, obs_dim]
  std::vector<int> segment_lengths;
  // memory[b] is [S * memory_length, d_embed], segment s at rows s*L..s*L+L-1
  std::vector<netcore::BasicTensor<T>> memory;
};

template <typename T>
struct TrunkOutputs {
  netcore::Var embedding;   // encoder output, [N, d]
  netcore::Var final;       // last block output, [N, d]
  netcore::Var mean;        // [N, action_dim]
  netcore::Var value;       // [N, 1]
  netcore::Var log_std;     // [action_dim], unclamped parameter
  std::vector<netcore::Var> block_inputs;
  std::vector<netcore::Var> block_keys;    // token key projections per block
  std::vector<netcore::Var> block_values;  // token value projections per block
};

// Policy and value at one step for a batch of environments.
struct StepOutput {
  std::vector<float> mean;   // [E * action_dim]
  std::vector<float> value;  // [E]
  std::vector<float> log_std;
};

// Gated Transformer-XL actor-critic: observation encoder, stacked gated
// blocks attending over [memory || current tokens] with relative positions,
// Gaussian policy head and value head on a shared trunk.
template <typename T>
class Model {
 public:
  Model(const GTrXLConfig& cfg, std::uint64_t seed);
  Model(const GTrXLConfig& cfg, netcore::BasicParameterStore<T> params);

  const GTrXLConfig& config() const { return cfg_; }
  netcore::BasicParameterStore<T>& params() { return params_; }
  const netcore::BasicParameterStore<T>& params() const { return params_; }

  // Parameter version; bump after every in-place parameter change so cached
  // memory projections are rebuilt.
  long version() const { return version_; }
  void bump_version() { ++version_; }

  MemoryWindow<T> make_window() const;
  template <typename Rng>
  void reset_window(MemoryWindow<T>& w, Rng& rng) const {
    w.reset(rng, cfg_.memory_noise);
  }

  // Differentiable forward over a sequence batch.
  // Parameter gradients accumulate into params().
  TrunkOutputs<T> forward(netcore::BasicTape<T>& tape, const SequenceBatch<T>& batch);

  // One inference step for each environment: attends over each window, then
  // advances every window by one token per block. `obs` is [E, obs_dim].
  StepOutput step(std::span<const T> obs, std::span<MemoryWindow<T>* const> windows) const;

  // Inference step that leaves the windows unchanged (bootstrap values).
  StepOutput peek(std::span<const T> obs, std::span<MemoryWindow<T>* const> windows) const;

  // Builds the batch equivalent of `step` for the given windows.
  SequenceBatch<T> single_step_batch(std::span<const T> obs, std::span<MemoryWindow<T>* const> windows) const;

  static std::string block_prefix(int b) { return "blocks." + std::to_string(b) + "."; }

 private:
  StepOutput run_step(std::span<const T> obs, std::span<MemoryWindow<T>* const> windows, bool advance) const;
  using ParamLookup = std::function<netcore::Var(const std::string&)>;
  TrunkOutputs<T> forward_impl(netcore::BasicTape<T>& tape, const SequenceBatch<T>& batch,
                               const std::vector<netcore::BasicTensor<T>>* cached_keys,
                               const std::vector<netcore::BasicTensor<T>>* cached_values, const ParamLookup& P) const;
  void refresh_cache(MemoryWindow<T>& w) const;
  void init_parameters(std::uint64_t seed);
  void check_parameters() const;

  GTrXLConfig cfg_;
  netcore::BasicParameterStore<T> params_;
  long version_ = 0;
};

extern template class Model<float>;
extern template class Model<double>;

// Names and shapes of every parameter for a configuration.
std::vector<std::pair<std::string, std::vector<int>>> parameter_layout(const GTrXLConfig& cfg);

}  // namespace gtppo::gtrxl
