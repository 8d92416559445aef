#include "gtppo/ppo/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtppo/ppo/gae.hpp"

namespace gtppo::ppo {

gtrxl::SequenceBatch<float> chunk_batch(const RolloutBuffer& buf, std::span<const int> chunk_ids, int n_blocks) {
  gtrxl::SequenceBatch<float> b;
  int total = 0;
  for (int c : chunk_ids) total += buf.chunks[c].length;
  b.obs = netcore::Tensor::matrix(total, buf.obs_dim);
  int r = 0;
  for (int c : chunk_ids) {
    const Chunk& ch = buf.chunks[c];
    const std::size_t src = buf.index(ch.env, ch.start) * buf.obs_dim;
    std::copy_n(buf.observations.begin() + static_cast<std::ptrdiff_t>(src), static_cast<std::size_t>(ch.length) * buf.obs_dim,
                b.obs.data() + static_cast<std::size_t>(r) * buf.obs_dim);
    r += ch.length;
    b.segment_lengths.push_back(ch.length);
  }
  for (int blk = 0; blk < n_blocks; ++blk) {
    const auto& first = buf.chunks[chunk_ids[0]].memory[blk];
    const int L = first.rows(), d = first.cols();
    auto m = netcore::Tensor::matrix(static_cast<int>(chunk_ids.size()) * L, d);
    for (std::size_t s = 0; s < chunk_ids.size(); ++s) {
      const auto& src = buf.chunks[chunk_ids[s]].memory[blk];
      std::copy(src.values().begin(), src.values().end(), m.data() + s * L * d);
    }
    b.memory.push_back(std::move(m));
  }
  return b;
}

namespace {
gtrxl::GTrXLConfig with_env_dims(gtrxl::GTrXLConfig m, const env::EnvConfig& e) {
  m.obs_dim = e.obs_dim();
  m.action_dim = e.action_dim();
  return m;
}
const TrainConfig& validated(const TrainConfig& c) {
  c.validate();
  return c;
}
}  // namespace

Trainer::Trainer(TrainConfig cfg, env::EnvConfig env_cfg, gtrxl::GTrXLConfig model_cfg)
    : cfg_(validated(cfg)),
      env_cfg_(std::move(env_cfg)),
      model_(with_env_dims(model_cfg, env_cfg_), cfg.seed),
      envs_(env_cfg_, cfg.n_envs, cfg.seed),
      shuffle_rng_(cfg.seed ^ 0x5851f42d4c957f2dULL) {}

UpdateMetrics Trainer::run_update() {
  const int i = update_;
  const double lr = anneal(cfg_.lr, i, cfg_.updates);
  const double ent = anneal(cfg_.entropy_coef, i, cfg_.updates);

  envs_.reset_all(model_);
  RolloutBuffer buf = envs_.collect(model_, cfg_.worker_steps, std::min(cfg_.chunk_length, env_cfg_.episode_steps()));
  compute_advantages(buf, cfg_.gamma, cfg_.lambda);
  std::vector<double> adv = buf.advantages;
  normalize_advantages(adv);

  const int n_chunks = static_cast<int>(buf.chunks.size());
  const int n_mb = std::min(cfg_.minibatches, n_chunks);
  std::vector<int> order(n_chunks);
  std::iota(order.begin(), order.end(), 0);
  const int ad = buf.action_dim;

  UpdateMetrics m;
  int n_steps = 0;
  const auto snapshot = model_.params();
  try {
    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), shuffle_rng_);
      for (int mb = 0; mb < n_mb; ++mb) {
        const int lo = mb * n_chunks / n_mb, hi = (mb + 1) * n_chunks / n_mb;
        std::span<const int> ids(order.data() + lo, hi - lo);
        auto batch = chunk_batch(buf, ids, model_.config().n_blocks);
        std::vector<double> actions, old_lp, a_mb, r_mb;
        for (int c : ids) {
          const Chunk& ch = buf.chunks[c];
          for (int t = ch.start; t < ch.start + ch.length; ++t) {
            const std::size_t row = buf.index(ch.env, t);
            actions.insert(actions.end(), buf.actions.begin() + static_cast<std::ptrdiff_t>(row * ad),
                           buf.actions.begin() + static_cast<std::ptrdiff_t>((row + 1) * ad));
            old_lp.push_back(buf.log_probs[row]);
            a_mb.push_back(adv[row]);
            r_mb.push_back(buf.returns[row]);
          }
        }
        netcore::Tape tape(true);
        auto out = model_.forward(tape, batch);
        LossInputs in{actions, old_lp, a_mb, r_mb, cfg_.clip, cfg_.vf_coef, ent};
        LossComponents comp;
        auto loss = ppo_loss<float>(tape, out.mean, out.log_std, out.value, in, &comp);
        if (!std::isfinite(comp.total)) {
          throw DivergenceError("non-finite loss at update " + std::to_string(i + 1));
        }
        model_.params().zero_grad();
        tape.backward(loss);
        const double gn = model_.params().grad_norm();
        if (!std::isfinite(gn)) {
          throw DivergenceError("non-finite gradient norm at update " + std::to_string(i + 1));
        }
        if (gn > cfg_.max_grad_norm) model_.params().scale_grads(static_cast<float>(cfg_.max_grad_norm / gn));
        adam_.step(model_.params(), lr);
        model_.bump_version();
        m.policy_loss += comp.policy_loss;
        m.value_loss += comp.value_loss;
        m.entropy += comp.entropy;
        m.total_loss += comp.total;
        ++n_steps;
      }
    }
    for (auto& [name, e] : model_.params().entries()) {
      if (!e.value.all_finite()) {
        throw DivergenceError("non-finite parameter " + name + " at update " + std::to_string(i + 1));
      }
    }
  } catch (const DivergenceError&) {
    model_.params() = snapshot;
    model_.bump_version();
    throw;
  }

  ++update_;
  sim_time_ += buf.simulated_seconds;
  m.update = update_;
  m.policy_loss /= n_steps;
  m.value_loss /= n_steps;
  m.entropy /= n_steps;
  m.total_loss /= n_steps;
  m.mean_reward = buf.mean_episode_return();
  m.lr = lr;
  m.entropy_coef = ent;
  m.steps_collected = static_cast<long>(buf.n_envs) * buf.steps;
  m.elapsed_s = sim_time_;
  m.episodes = buf.completed_episodes();
  m.success_rate = m.episodes > 0 ? static_cast<double>(buf.successes) / m.episodes : 0.0;
  return m;
}

void Trainer::train(const std::function<void(const UpdateMetrics&, const gtrxl::Model<float>&)>& on_update) {
  while (update_ < cfg_.updates) {
    auto m = run_update();
    if (on_update) on_update(m, model_);
  }
}

}  // namespace gtppo::ppo
