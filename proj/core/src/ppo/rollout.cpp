#include "gtppo/ppo/rollout.hpp"

#include "gtppo/gtrxl/policy.hpp"
#include "gtppo/ppo/gae.hpp"

namespace gtppo::ppo {

double RolloutBuffer::mean_episode_return() const {
  const auto& src = episode_returns.empty() ? partial_returns : episode_returns;
  if (src.empty()) return 0.0;
  double s = 0.0;
  for (double r : src) s += r;
  return s / src.size();
}

VectorEnv::VectorEnv(const env::EnvConfig& cfg, int n_envs, std::uint64_t seed) {
  if (n_envs <= 0) throw ConfigError("ppo.n_envs must be positive");
  for (int i = 0; i < n_envs; ++i) {
    envs_.push_back(env::make_environment(cfg));
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), 0x9e3779b9u};
    rngs_.emplace_back(seq);
  }
  windows_.resize(n_envs);
  obs_.resize(n_envs);
}

void VectorEnv::reset_all(const gtrxl::Model<float>& model) {
  for (int i = 0; i < size(); ++i) {
    if (windows_[i].n_blocks() == 0) windows_[i] = model.make_window();
    obs_[i] = envs_[i]->reset(rngs_[i]);
    model.reset_window(windows_[i], rngs_[i]);
  }
}

RolloutBuffer VectorEnv::collect(const gtrxl::Model<float>& model, int steps, int chunk_length) {
  if (steps <= 0 || chunk_length <= 0) throw ConfigError("collect: steps and chunk_length must be positive");
  const int n_envs = size();
  const int od = envs_[0]->obs_dim();
  const int ad = envs_[0]->action_dim();
  if (od != model.config().obs_dim || ad != model.config().action_dim) {
    throw ConfigError("model dimensions (obs " + std::to_string(model.config().obs_dim) + ", action " +
                      std::to_string(model.config().action_dim) + ") do not match the environment (obs " +
                      std::to_string(od) + ", action " + std::to_string(ad) + ")");
  }
  for (auto& w : windows_) {
    if (w.n_blocks() == 0) throw RuntimeFailure("collect called before reset_all");
  }

  RolloutBuffer buf;
  buf.n_envs = n_envs;
  buf.steps = steps;
  buf.obs_dim = od;
  buf.action_dim = ad;
  const std::size_t rows = static_cast<std::size_t>(n_envs) * steps;
  buf.observations.resize(rows * od);
  buf.actions.resize(rows * ad);
  buf.log_probs.resize(rows);
  buf.values.resize(rows);
  buf.rewards.resize(rows);
  buf.dones.resize(rows);
  buf.bootstrap_values.resize(n_envs);

  std::vector<gtrxl::MemoryWindow<float>*> wptr;
  for (auto& w : windows_) wptr.push_back(&w);
  std::vector<int> open_chunk(n_envs, -1);
  std::vector<bool> fresh(n_envs, true);
  std::vector<double> running(n_envs, 0.0);
  std::vector<float> obs(static_cast<std::size_t>(n_envs) * od);
  const double dt = envs_[0]->config().dt;

  for (int t = 0; t < steps; ++t) {
    for (int i = 0; i < n_envs; ++i) {
      for (int j = 0; j < od; ++j) obs[static_cast<std::size_t>(i) * od + j] = static_cast<float>(obs_[i][j]);
      int c = open_chunk[i];
      if (c < 0 || fresh[i] || buf.chunks[c].length >= chunk_length) {
        Chunk ch;
        ch.env = i;
        ch.start = t;
        ch.memory = windows_[i].all_rows();
        buf.chunks.push_back(std::move(ch));
        open_chunk[i] = static_cast<int>(buf.chunks.size()) - 1;
        fresh[i] = false;
      }
      ++buf.chunks[open_chunk[i]].length;
    }
    const auto out = model.step(obs, wptr);
    for (int i = 0; i < n_envs; ++i) {
      const std::size_t row = buf.index(i, t);
      std::copy(obs.begin() + static_cast<std::ptrdiff_t>(i) * od, obs.begin() + static_cast<std::ptrdiff_t>(i + 1) * od,
                buf.observations.begin() + static_cast<std::ptrdiff_t>(row * od));
      gtrxl::GaussianPolicy pol(std::span<const float>(out.mean).subspan(static_cast<std::size_t>(i) * ad, ad),
                                std::span<const float>(out.log_std));
      auto s = gtrxl::sample_action(pol, rngs_[i]);
      std::copy(s.action.begin(), s.action.end(), buf.actions.begin() + static_cast<std::ptrdiff_t>(row * ad));
      buf.log_probs[row] = s.log_prob;
      buf.values[row] = out.value[i];
      auto res = envs_[i]->step(s.action);
      buf.rewards[row] = res.reward;
      buf.dones[row] = res.done ? 1 : 0;
      running[i] += res.reward;
      buf.simulated_seconds += dt;
      if (res.done) {
        buf.episode_returns.push_back(running[i]);
        if (res.info.success) ++buf.successes;
        running[i] = 0.0;
        obs_[i] = envs_[i]->reset(rngs_[i]);
        model.reset_window(windows_[i], rngs_[i]);
        fresh[i] = true;
      } else {
        obs_[i] = std::move(res.observation);
      }
    }
  }

  for (int i = 0; i < n_envs; ++i) {
    for (int j = 0; j < od; ++j) obs[static_cast<std::size_t>(i) * od + j] = static_cast<float>(obs_[i][j]);
    if (!fresh[i]) buf.partial_returns.push_back(running[i]);
  }
  const auto boot = model.peek(obs, wptr);
  for (int i = 0; i < n_envs; ++i) buf.bootstrap_values[i] = boot.value[i];
  return buf;
}

void compute_advantages(RolloutBuffer& buf, double gamma, double lambda) {
  const std::size_t rows = static_cast<std::size_t>(buf.n_envs) * buf.steps;
  buf.advantages.resize(rows);
  buf.returns.resize(rows);
  for (int i = 0; i < buf.n_envs; ++i) {
    const std::size_t o = buf.index(i, 0);
    auto g = compute_gae(std::span(buf.rewards).subspan(o, buf.steps), std::span(buf.values).subspan(o, buf.steps),
                         std::span(buf.dones).subspan(o, buf.steps), buf.bootstrap_values[i], gamma, lambda);
    std::copy(g.advantages.begin(), g.advantages.end(), buf.advantages.begin() + static_cast<std::ptrdiff_t>(o));
    std::copy(g.returns.begin(), g.returns.end(), buf.returns.begin() + static_cast<std::ptrdiff_t>(o));
  }
}

}  // namespace gtppo::ppo
