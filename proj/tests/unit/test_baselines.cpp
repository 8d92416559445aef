#include <doctest.h>

#include <cmath>
#include <random>

#include "gtppo/baselines/compare.hpp"
#include "gtppo/baselines/lqr.hpp"
#include "gtppo/baselines/shooting.hpp"
#include "gtppo/env/config.hpp"

using namespace gtppo;
using baselines::State2;

namespace {

// Unconstrained quadratic cost of an open-loop DI sequence, written out as
// J(u) = 0.5 u'Hu + g'u + c through explicit linear state maps.
struct QuadraticProgram {
  std::vector<std::vector<double>> H;
  std::vector<double> g;
};

QuadraticProgram di_program(const env::EnvConfig& cfg, const State2& x0) {
  const auto& p = cfg.phases[0];
  const int T = cfg.episode_steps();
  const double dt = cfg.dt;
  // x_k = Phi_k x0 + sum_j G_{k,j} u_j
  std::vector<std::array<double, 2>> free(T + 1);
  std::vector<std::vector<std::array<double, 2>>> G(T + 1, std::vector<std::array<double, 2>>(T, {0.0, 0.0}));
  free[0] = {x0[0], x0[1]};
  for (int k = 0; k < T; ++k) {
    free[k + 1] = {free[k][0] + dt * free[k][1], free[k][1]};
    for (int j = 0; j < T; ++j) {
      G[k + 1][j] = {G[k][j][0] + dt * G[k][j][1], G[k][j][1]};
    }
    G[k + 1][k][0] += 0.5 * dt * dt;
    G[k + 1][k][1] += dt;
  }
  QuadraticProgram qp;
  qp.H.assign(T, std::vector<double>(T, 0.0));
  qp.g.assign(T, 0.0);
  auto add_state_term = [&](int k, const env::Mat2& W) {
    for (int i = 0; i < T; ++i) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          qp.g[i] += 2.0 * G[k][i][a] * W[a][b] * free[k][b];
          for (int j = 0; j < T; ++j) qp.H[i][j] += 2.0 * G[k][i][a] * W[a][b] * G[k][j][b];
        }
      }
    }
  };
  for (int k = 0; k < T; ++k) {
    add_state_term(k, p.Q);
    qp.H[k][k] += 2.0 * p.R;
  }
  add_state_term(T, p.Qf);
  return qp;
}

// Conjugate gradient on H u = -g.
std::vector<double> solve_program(const QuadraticProgram& qp) {
  const std::size_t n = qp.g.size();
  std::vector<double> u(n, 0.0), r(n), d(n), Hd(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = -qp.g[i];
  d = r;
  double rr = 0.0;
  for (double v : r) rr += v * v;
  for (int it = 0; it < 2000 && rr > 1e-30; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      Hd[i] = 0.0;
      for (std::size_t j = 0; j < n; ++j) Hd[i] += qp.H[i][j] * d[j];
    }
    double dHd = 0.0;
    for (std::size_t i = 0; i < n; ++i) dHd += d[i] * Hd[i];
    const double a = rr / dHd;
    for (std::size_t i = 0; i < n; ++i) {
      u[i] += a * d[i];
      r[i] -= a * Hd[i];
    }
    double rr2 = 0.0;
    for (double v : r) rr2 += v * v;
    for (std::size_t i = 0; i < n; ++i) d[i] = r[i] + rr2 / rr * d[i];
    rr = rr2;
  }
  return u;
}

env::EnvConfig unclamped_di() {
  auto cfg = env::default_env_config("di");
  cfg.u_max = 1e6;
  return cfg;
}

}  // namespace

TEST_CASE("di discretization is the exact zero-order hold") {
  auto s = baselines::di_discretization(0.1);
  CHECK(s.A[0][0] == 1.0);
  CHECK(s.A[0][1] == doctest::Approx(0.1));
  CHECK(s.A[1][0] == 0.0);
  CHECK(s.B[0] == doctest::Approx(0.005));
  CHECK(s.B[1] == doctest::Approx(0.1));
}

TEST_CASE("lqr degenerate horizons and costs") {
  auto sys = baselines::di_discretization(0.1);
  auto s0 = baselines::lqr_solve(sys, env::diag2(1, 1), 0.1, env::diag2(20, 20), 0);
  CHECK(s0.K.empty());
  REQUIRE(s0.P.size() == 1);
  CHECK(s0.P[0][0][0] == 20.0);
  auto z = baselines::lqr_solve(sys, env::diag2(0, 0), 0.1, env::diag2(0, 0), 10);
  for (const auto& k : z.K) {
    CHECK(k[0] == 0.0);
    CHECK(k[1] == 0.0);
  }
  CHECK_THROWS_AS(baselines::lqr_solve(sys, env::diag2(1, 1), 0.0, env::diag2(1, 1), 3), ConfigError);
}

TEST_CASE("riccati matrices are symmetric and positive semidefinite") {
  auto sol = baselines::lqr_for(env::default_env_config("di"));
  REQUIRE(sol.P.size() == 51);
  for (const auto& P : sol.P) {
    CHECK(std::fabs(P[0][1] - P[1][0]) < 1e-12);
    const double tr = P[0][0] + P[1][1];
    const double det = P[0][0] * P[1][1] - P[0][1] * P[1][0];
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    CHECK(tr / 2.0 - disc >= -1e-10);
  }
}

TEST_CASE("lqr gains agree with a direct quadratic program over the control sequence") {
  auto cfg = unclamped_di();
  auto sol = baselines::lqr_for(cfg);
  for (const State2 x0 : {State2{1.0, 0.0}, State2{0.0, 1.0}, State2{0.4, -0.7}}) {
    auto u = solve_program(di_program(cfg, x0));
    const double u0_lqr = -(sol.K[0][0] * x0[0] + sol.K[0][1] * x0[1]);
    CHECK(std::fabs(u[0] - u0_lqr) < 1e-6);
    auto tr = baselines::simulate_lqr(x0, sol, cfg);
    for (int k = 0; k < 50; ++k) CHECK(std::fabs(tr.controls[k] - u[k]) < 1e-6);
  }
}

TEST_CASE("unconstrained lqr rollout cost equals the quadratic value function") {
  auto cfg = unclamped_di();
  auto sol = baselines::lqr_for(cfg);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    State2 x0{u(rng), u(rng)};
    auto tr = baselines::simulate_lqr(x0, sol, cfg);
    CHECK(std::fabs(tr.cost - baselines::quadratic_form(sol.P[0], x0)) < 1e-8);
  }
  auto zero = baselines::simulate_lqr({0.0, 0.0}, sol, cfg);
  CHECK(zero.cost == 0.0);
  for (double c : zero.controls) CHECK(c == 0.0);
}

TEST_CASE("clamped lqr rollout cannot beat the unconstrained bound") {
  auto cfg = env::default_env_config("di");
  auto sol = baselines::lqr_for(cfg);
  auto tr = baselines::simulate_lqr({1.0, 1.0}, sol, cfg);
  CHECK(tr.cost >= baselines::quadratic_form(sol.P[0], {1.0, 1.0}) - 1e-12);
  for (double c : tr.controls) CHECK(std::fabs(c) <= cfg.u_max);
}

TEST_CASE("shooting cost matches the environment rollout") {
  auto cfg = env::default_env_config("vdp");
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> seq(cfg.episode_steps());
  for (double& v : seq) v = u(rng);
  const State2 x0{0.5, -0.3};
  auto tr = baselines::rollout_open_loop(cfg, x0, seq);
  CHECK(baselines::shooting_cost(cfg, x0, seq) == doctest::Approx(tr.cost).epsilon(1e-12));
}

TEST_CASE("shooting from the target equilibrium stays at zero") {
  auto cfg = env::default_env_config("vdp");
  baselines::ShootingOptions opt;
  opt.restarts = 0;
  auto s = baselines::vdp_optimize({0.0, 0.0}, cfg, opt);
  CHECK(s.cost < 1e-12);
  for (double c : s.controls) CHECK(std::fabs(c) < 1e-6);
}

TEST_CASE("shooting is monotone and matches a multi-restart oracle") {
  auto cfg = env::default_env_config("vdp");
  baselines::ShootingOptions single;
  single.restarts = 0;
  const State2 x0{0.5, -0.3};
  auto s = baselines::vdp_optimize(x0, cfg, single);
  for (std::size_t k = 1; k < s.cost_history.size(); ++k) CHECK(s.cost_history[k] <= s.cost_history[k - 1]);
  for (double c : s.controls) CHECK(std::fabs(c) <= cfg.u_max);
  baselines::ShootingOptions multi;
  multi.restarts = 5;
  multi.seed = 99;
  auto m = baselines::vdp_optimize(x0, cfg, multi);
  CHECK(s.cost <= 1.01 * m.cost);
  CHECK(m.cost <= s.cost + 1e-12);
}

TEST_CASE("shooting on the double integrator reaches the lqr optimum when bounds are inactive") {
  auto cfg = unclamped_di();
  cfg.u_max = 50.0;
  const State2 x0{0.6, 0.2};
  baselines::ShootingOptions opt;
  opt.restarts = 0;
  auto s = baselines::shooting_descent(cfg, x0, std::vector<double>(cfg.episode_steps(), 0.0), opt);
  const double opt_cost = baselines::quadratic_form(baselines::lqr_for(cfg).P[0], x0);
  CHECK(s.cost == doctest::Approx(opt_cost).epsilon(1e-8));
}

TEST_CASE("heavy control cost drives the shooting solution toward zero") {
  auto cfg = env::default_env_config("vdp");
  cfg.eps = 0.0;
  cfg.phases[0].R = 1e6;
  baselines::ShootingOptions opt;
  opt.restarts = 0;
  auto s = baselines::vdp_optimize({0.5, -0.3}, cfg, opt);
  for (double c : s.controls) CHECK(std::fabs(c) < 1e-4);
}

TEST_CASE("self comparison yields unit ratios") {
  auto cfg = env::default_env_config("di");
  auto sol = baselines::lqr_for(cfg);
  auto rep = baselines::compare(
      cfg, [&](const State2& x0) { return baselines::simulate_lqr(x0, sol, cfg); }, 10, 3);
  REQUIRE(rep.cases.size() == 10);
  for (const auto& c : rep.cases) CHECK(c.ratio == 1.0);
  CHECK(rep.summary.mean_ratio == 1.0);
  CHECK(rep.summary.n_included == 10);
  CHECK(rep.baseline == "lqr");

  auto again = baselines::compare(
      cfg, [&](const State2& x0) { return baselines::simulate_lqr(x0, sol, cfg); }, 10, 3);
  for (std::size_t i = 0; i < 10; ++i) CHECK(again.cases[i].x0 == rep.cases[i].x0);
  CHECK_THROWS_AS(baselines::compare(env::default_env_config("di-multi"), nullptr, 1, 1), ConfigError);
}

TEST_CASE("summary excludes flagged cases") {
  std::vector<baselines::CompareCase> cases(3);
  cases[0].ratio = 1.1;
  cases[1].ratio = 1.3;
  cases[2].baseline_ok = false;
  cases[2].ratio = 99.0;
  cases[1].success = true;
  auto s = baselines::summarize(cases);
  CHECK(s.n_cases == 3);
  CHECK(s.n_included == 2);
  CHECK(s.mean_ratio == doctest::Approx(1.2));
  CHECK(s.min_ratio == doctest::Approx(1.1));
  CHECK(s.max_ratio == doctest::Approx(1.3));
  CHECK(s.successes == 1);
}
