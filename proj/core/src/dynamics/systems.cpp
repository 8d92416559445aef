#include "gtppo/dynamics/systems.hpp"

namespace gtppo::dynamics {

State2 di_derivative(const State2& x, double u) { return {x[1], u}; }

State2 vdp_derivative(const State2& x, double u, double eps) {
  if (eps < 0.0) throw ConfigError("vdp_derivative: eps must be non-negative");
  return {x[1], -x[0] + eps * (1.0 - x[0] * x[0]) * x[1] + u};
}

State2 di_step(const State2& x, double u, double dt) {
  return rk4_step([u](double, const State2& s) { return di_derivative(s, u); }, x, 0.0, dt);
}

State2 vdp_step(const State2& x, double u, double eps, double dt) {
  return rk4_step([u, eps](double, const State2& s) { return vdp_derivative(s, u, eps); }, x, 0.0, dt);
}

}  // namespace gtppo::dynamics
