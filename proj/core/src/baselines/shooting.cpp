#include "gtppo/baselines/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gtppo::baselines {

namespace {

void check_single_phase(const env::EnvConfig& cfg) {
  if (cfg.system == env::SystemId::rocket || cfg.phases.size() != 1) {
    throw ConfigError("shooting requires a single-phase control environment");
  }
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> project(std::vector<double> u, double u_max) {
  for (double& x : u) x = std::clamp(x, -u_max, u_max);
  return u;
}

}  // namespace

double shooting_cost(const env::EnvConfig& cfg, const State2& x0, const std::vector<double>& u) {
  check_single_phase(cfg);
  const auto& spec = cfg.phases[0];
  State2 x = x0;
  double j = 0.0;
  for (double uk : u) {
    const double c = std::clamp(uk, -cfg.u_max, cfg.u_max);
    j += env::running_cost(x, c, spec);
    x = cfg.system == env::SystemId::di ? dynamics::di_step(x, c, cfg.dt) : dynamics::vdp_step(x, c, cfg.eps, cfg.dt);
  }
  return j + env::terminal_cost(x, spec);
}

std::vector<double> shooting_gradient(const env::EnvConfig& cfg, const State2& x0, const std::vector<double>& u, double h) {
  std::vector<double> g(u.size());
  std::vector<double> w = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    w[i] = u[i] + h;
    const double fp = shooting_cost(cfg, x0, w);
    w[i] = u[i] - h;
    const double fm = shooting_cost(cfg, x0, w);
    w[i] = u[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

TrajectorySolution shooting_descent(const env::EnvConfig& cfg, const State2& x0, std::vector<double> u0,
                                    const ShootingOptions& opt) {
  check_single_phase(cfg);
  if (static_cast<int>(u0.size()) != cfg.episode_steps()) throw ConfigError("initial control sequence has the wrong length");
  if (opt.max_iters < 0 || !(opt.fd_step > 0.0)) throw ConfigError("invalid shooting options");
  // Keep the fd stencil inside the bounds so the clamped cost stays smooth.
  const double inner = cfg.u_max - 2.0 * opt.fd_step;
  auto proj = [&](std::vector<double> u) { return project(std::move(u), inner); };

  TrajectorySolution s;
  std::vector<double> u = proj(std::move(u0));
  double j = shooting_cost(cfg, x0, u);
  std::vector<double> g = shooting_gradient(cfg, x0, u, opt.fd_step);
  double alpha = 1e-2;
  s.cost_history.push_back(j);
  for (s.iterations = 0; s.iterations < opt.max_iters; ++s.iterations) {
    std::vector<double> pg(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) pg[i] = u[i] - std::clamp(u[i] - g[i], -inner, inner);
    s.grad_norm = norm(pg);
    if (s.grad_norm < opt.grad_tol) {
      s.converged = true;
      break;
    }
    bool accepted = false;
    std::vector<double> un;
    double jn = j;
    for (int bt = 0; bt < 60; ++bt) {
      un = u;
      for (std::size_t i = 0; i < u.size(); ++i) un[i] -= alpha * g[i];
      un = proj(std::move(un));
      double decrease = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) decrease += g[i] * (u[i] - un[i]);
      jn = shooting_cost(cfg, x0, un);
      if (jn <= j - 1e-4 * decrease) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    auto gn = shooting_gradient(cfg, x0, un, opt.fd_step);
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double si = un[i] - u[i], yi = gn[i] - g[i];
      ss += si * si;
      sy += si * yi;
    }
    alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-6, 1e3) : std::min(alpha * 2.0, 1e3);
    u = std::move(un);
    g = std::move(gn);
    j = jn;
    s.cost_history.push_back(j);
  }
  s.controls = u;
  s.trajectory = rollout_open_loop(cfg, x0, u);
  s.cost = s.trajectory.cost;
  return s;
}

TrajectorySolution vdp_optimize(const State2& x0, const env::EnvConfig& cfg, const ShootingOptions& opt) {
  check_single_phase(cfg);
  const int T = cfg.episode_steps();
  TrajectorySolution best = shooting_descent(cfg, x0, std::vector<double>(T, 0.0), opt);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u(-cfg.u_max, cfg.u_max);
  for (int r = 0; r < opt.restarts; ++r) {
    std::vector<double> guess(T);
    for (double& v : guess) v = u(rng);
    auto s = shooting_descent(cfg, x0, std::move(guess), opt);
    if (s.cost < best.cost) best = std::move(s);
  }
  return best;
}

}  // namespace gtppo::baselines
