#include <benchmark/benchmark.h>

#include <random>

#include "gtppo/dynamics/rocket.hpp"
#include "gtppo/io/config.hpp"
#include "gtppo/netcore/kernels.hpp"
#include "gtppo/ppo/trainer.hpp"

using namespace gtppo;

static void BM_AffineRows(benchmark::State& state) {
  const int rows = static_cast<int>(state.range(0)), d = 128;
  std::vector<float> x(rows * d, 0.5f), w(d * d, 0.01f), b(d, 0.1f), y(rows * d);
  for (auto _ : state) {
    netcore::kernels::affine_rows(x.data(), rows, d, w.data(), d, b.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * rows * d * d);
}
BENCHMARK(BM_AffineRows)->Arg(1)->Arg(8)->Arg(64)->Arg(512);

static void BM_ModelStep(benchmark::State& state) {
  auto cfg = io::default_model_config(state.range(0) == 0 ? "di" : "rocket");
  const int envs = 8;
  gtrxl::Model<float> model(cfg, 1);
  std::mt19937_64 rng(1);
  std::vector<gtrxl::MemoryWindow<float>> windows(envs, model.make_window());
  std::vector<gtrxl::MemoryWindow<float>*> ptr;
  for (auto& w : windows) {
    model.reset_window(w, rng);
    ptr.push_back(&w);
  }
  std::vector<float> obs(envs * cfg.obs_dim, 0.1f);
  for (auto _ : state) benchmark::DoNotOptimize(model.step(obs, ptr));
  state.SetItemsProcessed(state.iterations() * envs);
}
BENCHMARK(BM_ModelStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_ForwardBackward(benchmark::State& state) {
  auto cfg = io::default_model_config("di");
  gtrxl::Model<float> model(cfg, 1);
  const int segments = 8, len = 64;
  gtrxl::SequenceBatch<float> b;
  b.obs = netcore::Tensor::matrix(segments * len, cfg.obs_dim, 0.1f);
  b.segment_lengths.assign(segments, len);
  for (int k = 0; k < cfg.n_blocks; ++k) b.memory.push_back(netcore::Tensor::matrix(segments * cfg.memory_length, cfg.d_embed, 0.01f));
  for (auto _ : state) {
    netcore::Tape tape(true);
    auto out = model.forward(tape, b);
    auto loss = netcore::sum(tape, out.value);
    model.params().zero_grad();
    tape.backward(loss);
  }
  state.SetItemsProcessed(state.iterations() * segments * len);
}
BENCHMARK(BM_ForwardBackward)->Unit(benchmark::kMillisecond);

static void BM_RocketPropagate(benchmark::State& state) {
  dynamics::VehicleConfig v;
  dynamics::PhaseSchedule s;
  dynamics::PhysicalConstants c;
  for (auto _ : state) {
    auto st = dynamics::launch_state(v, s, c);
    for (int k = 0; k < 100; ++k) {
      const double n = dynamics::norm(st.r);
      dynamics::propagate_rocket(st, {st.r[0] / n, st.r[1] / n, st.r[2] / n}, 0.5, v, s, c);
    }
    benchmark::DoNotOptimize(st.m);
  }
}
BENCHMARK(BM_RocketPropagate)->Unit(benchmark::kMicrosecond);

static void BM_PpoUpdateSmall(benchmark::State& state) {
  auto cfg = io::default_run_config("di");
  cfg.train.n_envs = 2;
  cfg.train.worker_steps = 64;
  cfg.train.epochs = 1;
  cfg.train.updates = 1 << 20;
  ppo::Trainer trainer(cfg.train, cfg.env, cfg.model);
  for (auto _ : state) benchmark::DoNotOptimize(trainer.run_update());
}
BENCHMARK(BM_PpoUpdateSmall)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
