#include "gtppo/baselines/lqr.hpp"

namespace gtppo::baselines {

DiscreteLinear di_discretization(double dt) {
  if (!(dt > 0.0)) throw ConfigError("di_discretization: dt must be positive");
  return {{{{1.0, dt}, {0.0, 1.0}}}, {0.5 * dt * dt, dt}};
}

double quadratic_form(const Mat2& P, const State2& x) {
  return x[0] * (P[0][0] * x[0] + P[0][1] * x[1]) + x[1] * (P[1][0] * x[0] + P[1][1] * x[1]);
}

LqrSolution lqr_solve(const DiscreteLinear& sys, const Mat2& Q, double R, const Mat2& Qf, int T) {
  if (T < 0) throw ConfigError("lqr_solve: negative horizon");
  if (!(R > 0.0)) throw ConfigError("lqr_solve: R must be positive");
  const auto& A = sys.A;
  const auto& B = sys.B;
  LqrSolution sol;
  sol.P.assign(T + 1, Mat2{});
  sol.K.assign(T, {0.0, 0.0});
  sol.P[T] = Qf;
  for (int t = T - 1; t >= 0; --t) {
    const Mat2& Pn = sol.P[t + 1];
    // PB, B'PB, B'PA
    const std::array<double, 2> PB{Pn[0][0] * B[0] + Pn[0][1] * B[1], Pn[1][0] * B[0] + Pn[1][1] * B[1]};
    const double s = R + B[0] * PB[0] + B[1] * PB[1];
    if (!(s > 0.0)) throw RuntimeFailure("lqr_solve: singular R + B'PB");
    const std::array<double, 2> BtPA{PB[0] * A[0][0] + PB[1] * A[1][0], PB[0] * A[0][1] + PB[1] * A[1][1]};
    const std::array<double, 2> K{BtPA[0] / s, BtPA[1] / s};
    Mat2 AtPA{};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        double v = 0.0;
        for (int k = 0; k < 2; ++k) {
          for (int l = 0; l < 2; ++l) v += A[k][i] * Pn[k][l] * A[l][j];
        }
        AtPA[i][j] = v;
      }
    }
    Mat2 P{};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) P[i][j] = Q[i][j] + AtPA[i][j] - BtPA[i] * BtPA[j] / s;
    }
    const double off = 0.5 * (P[0][1] + P[1][0]);
    P[0][1] = P[1][0] = off;
    sol.P[t] = P;
    sol.K[t] = K;
  }
  return sol;
}

LqrSolution lqr_for(const env::EnvConfig& cfg) {
  if (cfg.system != env::SystemId::di || cfg.phases.size() != 1) {
    throw ConfigError("LQR baseline requires the single-phase double integrator");
  }
  const auto& p = cfg.phases[0];
  if (p.target[0] != 0.0 || p.target[1] != 0.0) throw ConfigError("LQR baseline requires a target at the origin");
  return lqr_solve(di_discretization(cfg.dt), p.Q, p.R, p.Qf, cfg.episode_steps());
}

Trajectory simulate_lqr(const State2& x0, const LqrSolution& sol, const env::EnvConfig& cfg) {
  if (static_cast<int>(sol.K.size()) != cfg.episode_steps()) throw ConfigError("LQR horizon does not match the environment");
  return rollout(cfg, x0, [&](int k, const State2& x) { return -(sol.K[k][0] * x[0] + sol.K[k][1] * x[1]); });
}

}  // namespace gtppo::baselines
