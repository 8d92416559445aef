#pragma once

#include <cstdint>
#include <vector>

#include "gtppo/baselines/trajectory.hpp"

namespace gtppo::baselines {

struct ShootingOptions {
  int max_iters = 5000;
  double grad_tol = 1e-6;  // projected-gradient norm
  double fd_step = 1e-6;
  int restarts = 4;        // random restarts on top of the zero initial guess
  std::uint64_t seed = 1;
};

struct TrajectorySolution {
  std::vector<double> controls;
  Trajectory trajectory;
  double cost = 0.0;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
  std::vector<double> cost_history;  // cost after each accepted iteration
};

// Open-loop cost of a control sequence for a single-phase control environment.
double shooting_cost(const env::EnvConfig& cfg, const State2& x0, const std::vector<double>& u);

// Central finite-difference gradient of shooting_cost.
std::vector<double> shooting_gradient(const env::EnvConfig& cfg, const State2& x0, const std::vector<double>& u, double h);

// Projected gradient descent with Barzilai-Borwein trial steps and an Armijo
// backtracking search, starting from `u0`.
TrajectorySolution shooting_descent(const env::EnvConfig& cfg, const State2& x0, std::vector<double> u0,
                                    const ShootingOptions& opt);

// Best of the zero initial guess and `opt.restarts` uniform random guesses.
TrajectorySolution vdp_optimize(const State2& x0, const env::EnvConfig& cfg, const ShootingOptions& opt = {});

}  // namespace gtppo::baselines
