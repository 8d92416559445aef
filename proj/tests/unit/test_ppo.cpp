#include <doctest.h>

#include <cmath>
#include <random>

#include "gtppo/env/config.hpp"
#include "gtppo/gtrxl/policy.hpp"
#include "gtppo/netcore/grad_check.hpp"
#include "gtppo/ppo/config.hpp"
#include "gtppo/ppo/gae.hpp"
#include "gtppo/ppo/loss.hpp"
#include "gtppo/ppo/rollout.hpp"
#include "gtppo/ppo/trainer.hpp"

using namespace gtppo;

namespace {

// Literal double sum of (gamma lambda)^l delta_{t+l} up to the first done.
std::vector<double> brute_force_gae(const std::vector<double>& r, const std::vector<double>& v,
                                    const std::vector<unsigned char>& d, double boot, double g, double l) {
  const std::size_t n = r.size();
  auto value_at = [&](std::size_t k) { return k < n ? v[k] : boot; };
  std::vector<double> delta(n);
  for (std::size_t k = 0; k < n; ++k) delta[k] = r[k] + g * value_at(k + 1) * (d[k] ? 0.0 : 1.0) - v[k];
  std::vector<double> a(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double w = 1.0;
    for (std::size_t k = t; k < n; ++k) {
      a[t] += w * delta[k];
      if (d[k]) break;
      w *= g * l;
    }
  }
  return a;
}

gtrxl::GTrXLConfig tiny_model(int obs_dim, int action_dim) {
  gtrxl::GTrXLConfig c;
  c.n_blocks = 1;
  c.d_embed = 8;
  c.n_heads = 2;
  c.memory_length = 4;
  c.mlp_dim = 8;
  c.hidden_dim = 8;
  c.obs_dim = obs_dim;
  c.action_dim = action_dim;
  return c;
}

}  // namespace

TEST_CASE("gae small examples") {
  std::vector<double> r{3.0}, v{1.0};
  std::vector<unsigned char> d{1};
  auto g = ppo::compute_gae(r, v, d, 100.0, 0.9, 0.9);
  CHECK(g.advantages[0] == doctest::Approx(2.0));

  std::vector<double> r2{1.0, 1.0}, v2{0.0, 0.0};
  std::vector<unsigned char> d2{0, 0};
  g = ppo::compute_gae(r2, v2, d2, 0.0, 1.0, 1.0);
  CHECK(g.advantages[0] == doctest::Approx(2.0));
  CHECK(g.advantages[1] == doctest::Approx(1.0));
  g = ppo::compute_gae(r2, v2, d2, 0.0, 0.5, 0.5);
  CHECK(g.advantages[0] == doctest::Approx(1.25));
  CHECK(g.advantages[1] == doctest::Approx(1.0));
  CHECK(g.returns[0] == doctest::Approx(1.25));
}

TEST_CASE("gae matches brute-force summation on random sequences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> len(1, 50);
  std::bernoulli_distribution done(0.1);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = len(rng);
    std::vector<double> r(n), v(n);
    std::vector<unsigned char> d(n);
    for (int k = 0; k < n; ++k) {
      r[k] = u(rng);
      v[k] = u(rng);
      d[k] = done(rng) ? 1 : 0;
    }
    const double boot = u(rng);
    const double gamma = 0.9 + 0.1 * (u(rng) + 2.0) / 4.0;
    const double lambda = 0.8 + 0.2 * (u(rng) + 2.0) / 4.0;
    auto g = ppo::compute_gae(r, v, d, boot, gamma, lambda);
    auto oracle = brute_force_gae(r, v, d, boot, gamma, lambda);
    for (int k = 0; k < n; ++k) {
      worst = std::max(worst, std::fabs(g.advantages[k] - oracle[k]));
      CHECK(g.returns[k] == doctest::Approx(g.advantages[k] + v[k]).epsilon(1e-14));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("advantage normalization") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(4.0, 7.0);
  std::vector<double> a(777);
  for (auto& x : a) x = n(rng);
  ppo::normalize_advantages(a);
  double mean = 0.0, var = 0.0;
  for (double x : a) mean += x;
  mean /= a.size();
  for (double x : a) var += (x - mean) * (x - mean);
  var /= a.size();
  CHECK(std::fabs(mean) < 1e-6);
  CHECK(std::fabs(std::sqrt(var) - 1.0) < 1e-6);
}

TEST_CASE("anneal is linear between endpoints") {
  ppo::Schedule s{3e-4, 3e-5};
  CHECK(ppo::anneal(s, 0, 1000) == doctest::Approx(3e-4));
  CHECK(ppo::anneal(s, 1000, 1000) == doctest::Approx(3e-5));
  CHECK(ppo::anneal(s, 500, 1000) == doctest::Approx(1.65e-4));
}

TEST_CASE("train defaults follow the published hyperparameters") {
  auto di = ppo::default_train_config("di");
  CHECK(di.updates == 1000);
  CHECK(di.epochs == 8);
  CHECK(di.worker_steps == 256);
  CHECK(di.clip == doctest::Approx(0.2));
  auto vdp = ppo::default_train_config("vdp");
  CHECK(vdp.epochs == 10);
  CHECK(vdp.worker_steps == 512);
  auto rk = ppo::default_train_config("rocket");
  CHECK(rk.updates == 5000);
  CHECK(rk.epochs == 16);
  CHECK(rk.clip == doctest::Approx(0.12));
  CHECK(rk.vf_coef == doctest::Approx(0.8));
  CHECK(rk.lr.initial == doctest::Approx(1e-4));
  CHECK(rk.lr.final == doctest::Approx(5e-6));
  CHECK_THROWS_AS(ppo::default_train_config("pendulum"), ConfigError);
  auto bad = di;
  bad.clip = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("clipped surrogate examples") {
  CHECK(ppo::clipped_surrogate(2.0, 1.0, 0.2) == doctest::Approx(1.2));
  CHECK(ppo::clipped_surrogate(0.5, -1.0, 0.2) == doctest::Approx(-0.8));
  CHECK(ppo::clipped_surrogate(1.0, 0.7, 0.2) == doctest::Approx(0.7));
}

TEST_CASE("ppo loss gradient matches finite differences") {
  const int n = 5, a = 2;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> actions(n * a), old_lp(n), adv(n), ret(n);
  for (auto& x : actions) x = g(rng);
  for (auto& x : adv) x = g(rng);
  for (auto& x : ret) x = g(rng);
  for (int i = 0; i < n; ++i) old_lp[i] = -2.0 + 0.3 * g(rng);
  netcore::BasicTensor<double> mean = netcore::BasicTensor<double>::matrix(n, a), ls({a}), val({n, 1});
  for (auto& x : mean.values()) x = 0.3 * g(rng);
  ls[0] = -0.2;
  ls[1] = 0.3;
  for (auto& x : val.values()) x = g(rng);
  ppo::LossInputs in{actions, old_lp, adv, ret, 0.2, 0.7, 0.01};
  auto fn = [&](netcore::BasicTape<double>& t, const std::vector<netcore::Var>& v) {
    return ppo::ppo_loss<double>(t, v[0], v[1], v[2], in, nullptr);
  };
  auto r = netcore::grad_check(fn, {mean, ls, val}, 1e-5);
  CHECK(r.max_rel_error < 1e-3);
  INFO(r.worst_location);

  // Some ratios must fall outside the clip band for the check to cover both branches.
  ppo::LossComponents comp;
  netcore::BasicTape<double> tape(false);
  ppo::ppo_loss<double>(tape, tape.constant(mean), tape.constant(ls), tape.constant(val), in, &comp);
  CHECK(comp.clip_fraction > 0.0);
  CHECK(comp.total == doctest::Approx(comp.policy_loss + 0.7 * comp.value_loss - 0.01 * comp.entropy));
}

TEST_CASE("loss through a tiny model passes a parameter gradient check") {
  auto cfg = tiny_model(3, 1);
  gtrxl::Model<double> model(cfg, 9);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  gtrxl::SequenceBatch<double> batch;
  batch.obs = netcore::BasicTensor<double>::matrix(6, 3);
  for (auto& x : batch.obs.values()) x = g(rng);
  batch.segment_lengths = {4, 2};
  batch.memory.push_back(netcore::BasicTensor<double>::matrix(2 * cfg.memory_length, cfg.d_embed));
  for (auto& x : batch.memory[0].values()) x = 0.1 * g(rng);
  std::vector<double> actions(6), old_lp(6), adv(6), ret(6);
  for (auto& x : actions) x = g(rng);
  for (auto& x : adv) x = g(rng);
  for (auto& x : ret) x = g(rng);
  for (auto& x : old_lp) x = -1.0 + 0.1 * g(rng);
  ppo::LossInputs in{actions, old_lp, adv, ret, 0.2, 0.5, 0.01};
  auto r = netcore::grad_check_store(
      [&](netcore::BasicTape<double>& t, netcore::BasicParameterStore<double>&) {
        auto o = model.forward(t, batch);
        return ppo::ppo_loss<double>(t, o.mean, o.log_std, o.value, in, nullptr);
      },
      model.params());
  INFO(r.worst_location);
  CHECK(r.max_rel_error < 1e-3);
}

TEST_CASE("collection bookkeeping with one environment") {
  auto env_cfg = env::default_env_config("di");
  const int horizon = env_cfg.episode_steps();
  gtrxl::Model<float> model(tiny_model(env_cfg.obs_dim(), env_cfg.action_dim()), 4);
  ppo::VectorEnv envs(env_cfg, 1, 8);
  envs.reset_all(model);
  auto buf = envs.collect(model, horizon, 64);
  CHECK(buf.rewards.size() == static_cast<std::size_t>(horizon));
  CHECK(buf.completed_episodes() == 1);
  int dones = 0;
  for (auto d : buf.dones) dones += d;
  CHECK(dones == buf.completed_episodes());
  CHECK(buf.dones.back() == 1);

  envs.reset_all(model);
  auto longer = envs.collect(model, 3 * horizon + 7, 64);
  int d2 = 0;
  for (auto d : longer.dones) d2 += d;
  CHECK(d2 == longer.completed_episodes());
  CHECK(longer.completed_episodes() == 3);
  int covered = 0;
  for (const auto& ch : longer.chunks) {
    CHECK(ch.length <= 64);
    CHECK(ch.length > 0);
    covered += ch.length;
  }
  CHECK(covered == 3 * horizon + 7);
}

TEST_CASE("collection is deterministic for a fixed seed") {
  auto env_cfg = env::default_env_config("vdp");
  auto mcfg = tiny_model(env_cfg.obs_dim(), env_cfg.action_dim());
  auto run = [&]() {
    gtrxl::Model<float> model(mcfg, 21);
    ppo::VectorEnv envs(env_cfg, 3, 77);
    envs.reset_all(model);
    return envs.collect(model, 100, 32);
  };
  auto a = run(), b = run();
  CHECK(a.actions == b.actions);
  CHECK(a.rewards == b.rewards);
  CHECK(a.log_probs == b.log_probs);
  CHECK(a.observations == b.observations);
}

TEST_CASE("ratios are exactly one before the first optimizer step") {
  auto env_cfg = env::default_env_config("di-multi");
  auto mcfg = tiny_model(env_cfg.obs_dim(), env_cfg.action_dim());
  gtrxl::Model<float> model(mcfg, 3);
  ppo::VectorEnv envs(env_cfg, 4, 5);
  envs.reset_all(model);
  auto buf = envs.collect(model, 150, 64);
  ppo::compute_advantages(buf, 0.99, 0.95);
  std::vector<int> ids(buf.chunks.size());
  for (std::size_t c = 0; c < ids.size(); ++c) ids[c] = static_cast<int>(c);
  auto batch = ppo::chunk_batch(buf, ids, mcfg.n_blocks);
  std::vector<double> actions, old_lp, adv, ret;
  for (const auto& ch : buf.chunks) {
    for (int t = ch.start; t < ch.start + ch.length; ++t) {
      const auto row = buf.index(ch.env, t);
      actions.push_back(buf.actions[row]);
      old_lp.push_back(buf.log_probs[row]);
      adv.push_back(buf.advantages[row]);
      ret.push_back(buf.returns[row]);
    }
  }
  netcore::Tape tape(true);
  auto out = model.forward(tape, batch);
  ppo::LossComponents comp;
  ppo::ppo_loss<float>(tape, out.mean, out.log_std, out.value, {actions, old_lp, adv, ret, 0.2, 0.2, 0.0}, &comp);
  CHECK(comp.max_ratio_deviation < 1e-6);
  CHECK(comp.clip_fraction == 0.0);
  double mean_adv = 0.0;
  for (double x : adv) mean_adv += x;
  CHECK(-comp.policy_loss == doctest::Approx(mean_adv / adv.size()).epsilon(1e-9));
}

TEST_CASE("trainer smoke run") {
  auto env_cfg = env::default_env_config("di");
  auto tc = ppo::default_train_config("di");
  tc.updates = 3;
  tc.n_envs = 2;
  tc.worker_steps = 64;
  tc.epochs = 2;
  auto mcfg = tiny_model(0, 0);
  auto run = [&]() {
    ppo::Trainer trainer(tc, env_cfg, mcfg);
    std::vector<ppo::UpdateMetrics> log;
    trainer.train([&](const ppo::UpdateMetrics& m, const gtrxl::Model<float>&) { log.push_back(m); });
    return log;
  };
  auto a = run();
  REQUIRE(a.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(a[k].update == k + 1);
    CHECK(std::isfinite(a[k].mean_reward));
    CHECK(std::isfinite(a[k].total_loss));
    CHECK(a[k].steps_collected == 128);
  }
  CHECK(a[0].lr == doctest::Approx(3e-4));
  CHECK(a[2].elapsed_s == doctest::Approx(3 * 128 * env_cfg.dt));
  auto b = run();
  for (int k = 0; k < 3; ++k) {
    CHECK(a[k].total_loss == b[k].total_loss);
    CHECK(a[k].mean_reward == b[k].mean_reward);
  }
}
