#pragma once

#include <array>
#include <vector>

#include "gtppo/baselines/trajectory.hpp"

namespace gtppo::baselines {

using env::Mat2;

struct DiscreteLinear {
  Mat2 A{};
  std::array<double, 2> B{};
};

// Exact zero-order-hold discretization of the double integrator.
DiscreteLinear di_discretization(double dt);

struct LqrSolution {
  std::vector<std::array<double, 2>> K;  // u_t = -K_t x_t, t = 0..T-1
  std::vector<Mat2> P;                   // cost-to-go, P[T] = Qf
};

// Finite-horizon backward Riccati recursion.
LqrSolution lqr_solve(const DiscreteLinear& sys, const Mat2& Q, double R, const Mat2& Qf, int T);

// Solution for a single-phase double-integrator environment.
LqrSolution lqr_for(const env::EnvConfig& cfg);

// Closed-loop rollout with controls clamped to the environment bounds.
Trajectory simulate_lqr(const State2& x0, const LqrSolution& sol, const env::EnvConfig& cfg);

double quadratic_form(const Mat2& P, const State2& x);

}  // namespace gtppo::baselines
