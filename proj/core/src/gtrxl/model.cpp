#include "gtppo/gtrxl/model.hpp"

#include <random>

#include "gtppo/netcore/optim.hpp"

namespace gtppo::gtrxl {

using netcore::AttentionSegment;
using netcore::BasicTape;
using netcore::BasicTensor;
using netcore::Var;

std::vector<std::pair<std::string, std::vector<int>>> parameter_layout(const GTrXLConfig& cfg) {
  const int d = cfg.d_embed;
  std::vector<std::pair<std::string, std::vector<int>>> out = {
      {"encoder.l1.weight", {cfg.obs_dim, cfg.hidden_dim}},
      {"encoder.l1.bias", {cfg.hidden_dim}},
      {"encoder.l2.weight", {cfg.hidden_dim, d}},
      {"encoder.l2.bias", {d}},
  };
  for (int b = 0; b < cfg.n_blocks; ++b) {
    const std::string p = Model<float>::block_prefix(b);
    out.push_back({p + "attn.wq", {d, d}});
    out.push_back({p + "attn.wk", {d, d}});
    out.push_back({p + "attn.wv", {d, d}});
    out.push_back({p + "attn.wo", {d, d}});
    out.push_back({p + "attn.bo", {d}});
    out.push_back({p + "attn.rel", {cfg.memory_length + 1, d}});
    out.push_back({p + "ln1.gain", {d}});
    out.push_back({p + "ln1.bias", {d}});
    out.push_back({p + "gate1.weight", {2 * d, d}});
    out.push_back({p + "gate1.bias", {d}});
    out.push_back({p + "mlp.l1.weight", {d, cfg.mlp_dim}});
    out.push_back({p + "mlp.l1.bias", {cfg.mlp_dim}});
    out.push_back({p + "mlp.l2.weight", {cfg.mlp_dim, d}});
    out.push_back({p + "mlp.l2.bias", {d}});
    out.push_back({p + "ln2.gain", {d}});
    out.push_back({p + "ln2.bias", {d}});
    out.push_back({p + "gate2.weight", {2 * d, d}});
    out.push_back({p + "gate2.bias", {d}});
  }
  out.push_back({"policy.weight", {d, cfg.action_dim}});
  out.push_back({"policy.bias", {cfg.action_dim}});
  out.push_back({"policy.log_std", {cfg.action_dim}});
  out.push_back({"value.weight", {d, 1}});
  out.push_back({"value.bias", {1}});
  return out;
}

template <typename T>
Model<T>::Model(const GTrXLConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  init_parameters(seed);
}

template <typename T>
Model<T>::Model(const GTrXLConfig& cfg, netcore::BasicParameterStore<T> params) : cfg_(cfg), params_(std::move(params)) {
  cfg_.validate();
  check_parameters();
}

template <typename T>
void Model<T>::check_parameters() const {
  for (const auto& [name, shape] : parameter_layout(cfg_)) {
    if (!params_.contains(name)) throw ConfigError("missing parameter '" + name + "'");
    if (params_.value(name).shape() != shape) {
      throw ConfigError("parameter '" + name + "' has shape " + params_.value(name).shape_string() +
                        ", configuration expects another");
    }
  }
  if (params_.names().size() != parameter_layout(cfg_).size()) throw ConfigError("unexpected extra parameters");
}

template <typename T>
void Model<T>::init_parameters(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> small(-0.02, 0.02);
  for (const auto& [name, shape] : parameter_layout(cfg_)) {
    BasicTensor<T> t(shape);
    auto ends_with = [&](const char* s) {
      const std::string suffix(s);
      return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends_with("gate1.bias") || ends_with("gate2.bias")) {
      t.fill(static_cast<T>(cfg_.gate_bias_init));
    } else if (ends_with(".gain")) {
      t.fill(T(1));
    } else if (ends_with("log_std")) {
      t.fill(static_cast<T>(cfg_.init_log_std));
    } else if (ends_with("attn.rel")) {
      for (auto& v : t.values()) v = static_cast<T>(small(rng));
    } else if (name == "policy.weight") {
      netcore::xavier_uniform(t, rng, 0.01);
    } else if (t.rank() == 2) {
      netcore::xavier_uniform(t, rng);
    }
    params_.add(name, std::move(t));
  }
}

template <typename T>
MemoryWindow<T> Model<T>::make_window() const {
  return MemoryWindow<T>(cfg_.n_blocks, cfg_.memory_length, cfg_.d_embed);
}

template <typename T>
TrunkOutputs<T> Model<T>::forward(BasicTape<T>& tape, const SequenceBatch<T>& batch) {
  return forward_impl(tape, batch, nullptr, nullptr, [&](const std::string& name) { return tape.parameter(params_, name); });
}

template <typename T>
TrunkOutputs<T> Model<T>::forward_impl(BasicTape<T>& tape, const SequenceBatch<T>& batch,
                                       const std::vector<BasicTensor<T>>* cached_keys,
                                       const std::vector<BasicTensor<T>>* cached_values,
                                       const ParamLookup& P) const {
  const int n = batch.obs.rows();
  const int mem = cfg_.memory_length;
  if (batch.obs.cols() != cfg_.obs_dim) {
    throw ConfigError("observation width " + std::to_string(batch.obs.cols()) + " does not match obs_dim " +
                      std::to_string(cfg_.obs_dim));
  }
  if (!batch.obs.all_finite()) throw ConfigError("non-finite observation passed to the encoder");
  const int n_seg = static_cast<int>(batch.segment_lengths.size());
  if (static_cast<int>(batch.memory.size()) != cfg_.n_blocks) throw ConfigError("memory snapshot block count mismatch");
  std::vector<AttentionSegment> segments;
  segments.reserve(n_seg);
  int at = 0;
  for (int s = 0; s < n_seg; ++s) {
    segments.push_back({at, batch.segment_lengths[s], s * mem, mem});
    at += batch.segment_lengths[s];
  }
  if (at != n) throw ConfigError("segment lengths do not sum to the token count");
  for (const auto& m : batch.memory) {
    if (m.rows() != n_seg * mem || m.cols() != cfg_.d_embed) {
      throw ConfigError("memory snapshot shape " + m.shape_string() + " does not match configuration");
    }
  }

  TrunkOutputs<T> out;
  Var obs = tape.constant(batch.obs);
  Var h = netcore::tanh(tape, netcore::linear(tape, obs, P("encoder.l1.weight"), P("encoder.l1.bias")));
  Var x = netcore::linear(tape, h, P("encoder.l2.weight"), P("encoder.l2.bias"));
  out.embedding = x;

  for (int b = 0; b < cfg_.n_blocks; ++b) {
    const std::string p = block_prefix(b);
    out.block_inputs.push_back(x);
    Var wk = P(p + "attn.wk"), wv = P(p + "attn.wv");
    Var q = netcore::linear(tape, x, P(p + "attn.wq"));
    Var k = netcore::linear(tape, x, wk);
    Var v = netcore::linear(tape, x, wv);
    out.block_keys.push_back(k);
    out.block_values.push_back(v);
    Var mk, mv;
    if (cached_keys != nullptr) {
      mk = tape.constant((*cached_keys)[b]);
      mv = tape.constant((*cached_values)[b]);
    } else {
      Var m = tape.constant(batch.memory[b]);
      mk = netcore::linear(tape, m, wk);
      mv = netcore::linear(tape, m, wv);
    }
    Var ctx = netcore::relative_attention(tape, q, k, v, mk, mv, P(p + "attn.rel"), segments, cfg_.n_heads, mem);
    Var attn = netcore::linear(tape, ctx, P(p + "attn.wo"), P(p + "attn.bo"));
    Var n1 = netcore::layer_norm(tape, netcore::add(tape, x, attn), P(p + "ln1.gain"), P(p + "ln1.bias"), T(1e-5));
    Var h1 = netcore::gate(tape, x, n1, P(p + "gate1.weight"), P(p + "gate1.bias"));
    Var f = netcore::relu(tape, netcore::linear(tape, h1, P(p + "mlp.l1.weight"), P(p + "mlp.l1.bias")));
    Var m2 = netcore::linear(tape, f, P(p + "mlp.l2.weight"), P(p + "mlp.l2.bias"));
    Var n2 = netcore::layer_norm(tape, netcore::add(tape, h1, m2), P(p + "ln2.gain"), P(p + "ln2.bias"), T(1e-5));
    x = netcore::gate(tape, h1, n2, P(p + "gate2.weight"), P(p + "gate2.bias"));
  }
  out.final = x;
  out.mean = netcore::linear(tape, x, P("policy.weight"), P("policy.bias"));
  out.value = netcore::linear(tape, x, P("value.weight"), P("value.bias"));
  out.log_std = P("policy.log_std");
  return out;
}

template <typename T>
void Model<T>::refresh_cache(MemoryWindow<T>& w) const {
  if (w.cache_version == version_ && static_cast<int>(w.keys.size()) == cfg_.n_blocks) return;
  BasicTape<T> tape(false);
  w.keys.clear();
  w.values.clear();
  for (int b = 0; b < cfg_.n_blocks; ++b) {
    const std::string p = block_prefix(b);
    Var m = tape.constant(w.rows(b));
    w.keys.push_back(tape.value(netcore::linear(tape, m, tape.parameter(params_, p + "attn.wk"))));
    w.values.push_back(tape.value(netcore::linear(tape, m, tape.parameter(params_, p + "attn.wv"))));
  }
  w.cache_version = version_;
}

template <typename T>
SequenceBatch<T> Model<T>::single_step_batch(std::span<const T> obs, std::span<MemoryWindow<T>* const> windows) const {
  const int e = static_cast<int>(windows.size());
  if (static_cast<int>(obs.size()) != e * cfg_.obs_dim) throw ConfigError("observation batch size mismatch");
  SequenceBatch<T> batch;
  batch.obs = BasicTensor<T>({e, cfg_.obs_dim}, std::vector<T>(obs.begin(), obs.end()));
  batch.segment_lengths.assign(e, 1);
  const int mem = cfg_.memory_length, d = cfg_.d_embed;
  for (int b = 0; b < cfg_.n_blocks; ++b) {
    BasicTensor<T> m = BasicTensor<T>::matrix(e * mem, d);
    for (int i = 0; i < e; ++i) {
      const auto& src = windows[i]->rows(b);
      std::copy(src.data(), src.data() + src.size(), m.data() + static_cast<std::size_t>(i) * mem * d);
    }
    batch.memory.push_back(std::move(m));
  }
  return batch;
}

template <typename T>
StepOutput Model<T>::run_step(std::span<const T> obs, std::span<MemoryWindow<T>* const> windows, bool advance) const {
  const int e = static_cast<int>(windows.size());
  const int mem = cfg_.memory_length, d = cfg_.d_embed;
  for (auto* w : windows) {
    if (w->n_blocks() != cfg_.n_blocks || w->length() != mem || w->dim() != d) {
      throw ConfigError("memory window shape does not match the model configuration");
    }
    refresh_cache(*w);
  }
  SequenceBatch<T> batch = single_step_batch(obs, windows);
  std::vector<BasicTensor<T>> keys, values;
  for (int b = 0; b < cfg_.n_blocks; ++b) {
    BasicTensor<T> k = BasicTensor<T>::matrix(e * mem, d), v = BasicTensor<T>::matrix(e * mem, d);
    for (int i = 0; i < e; ++i) {
      std::copy(windows[i]->keys[b].data(), windows[i]->keys[b].data() + mem * d, k.data() + static_cast<std::size_t>(i) * mem * d);
      std::copy(windows[i]->values[b].data(), windows[i]->values[b].data() + mem * d,
                v.data() + static_cast<std::size_t>(i) * mem * d);
    }
    keys.push_back(std::move(k));
    values.push_back(std::move(v));
  }
  BasicTape<T> tape(false);
  TrunkOutputs<T> o = forward_impl(tape, batch, &keys, &values,
                                   [&](const std::string& name) { return tape.parameter(params_, name); });

  StepOutput out;
  const auto& mean = tape.value(o.mean);
  const auto& value = tape.value(o.value);
  out.mean.assign(mean.values().begin(), mean.values().end());
  out.value.assign(value.values().begin(), value.values().end());
  const auto& ls = tape.value(o.log_std);
  out.log_std.assign(ls.values().begin(), ls.values().end());

  if (advance) {
    for (int b = 0; b < cfg_.n_blocks; ++b) {
      const auto& xin = tape.value(o.block_inputs[b]);
      const auto& kin = tape.value(o.block_keys[b]);
      const auto& vin = tape.value(o.block_values[b]);
      for (int i = 0; i < e; ++i) {
        auto& w = *windows[i];
        w.push(b, xin.row(i));
        auto shift = [&](BasicTensor<T>& cache, std::span<const T> row) {
          std::copy(cache.data() + d, cache.data() + static_cast<std::size_t>(mem) * d, cache.data());
          std::copy(row.begin(), row.end(), cache.data() + static_cast<std::size_t>(mem - 1) * d);
        };
        shift(w.keys[b], kin.row(i));
        shift(w.values[b], vin.row(i));
      }
    }
    for (auto* w : windows) w->advance();
  }
  return out;
}

template <typename T>
StepOutput Model<T>::step(std::span<const T> obs, std::span<MemoryWindow<T>* const> windows) const {
  return run_step(obs, windows, true);
}

template <typename T>
StepOutput Model<T>::peek(std::span<const T> obs, std::span<MemoryWindow<T>* const> windows) const {
  return run_step(obs, windows, false);
}

template class Model<float>;
template class Model<double>;

}  // namespace gtppo::gtrxl
