#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "gtppo/errors.hpp"

namespace gtppo::dynamics {

template <std::size_t N>
using Vec = std::array<double, N>;

namespace detail {
template <std::size_t N>
Vec<N> axpy(const Vec<N>& x, double a, const Vec<N>& k) {
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = x[i] + a * k[i];
  return out;
}

template <std::size_t N>
void require_finite(const Vec<N>& k, double t) {
  for (double v : k) {
    if (!std::isfinite(v)) throw IntegrationError("non-finite derivative", t);
  }
}
}  // namespace detail

// Classical fourth-order Runge-Kutta step. `f(t, x)` returns dx/dt; the
// control is whatever `f` captures, so it is held constant over the step.
template <std::size_t N, typename F>
Vec<N> rk4_step(F&& f, const Vec<N>& x, double t, double dt) {
  if (!(dt > 0.0)) throw ConfigError("rk4_step: dt must be positive");
  const double h2 = 0.5 * dt;
  const Vec<N> k1 = f(t, x);
  detail::require_finite(k1, t);
  const Vec<N> k2 = f(t + h2, detail::axpy(x, h2, k1));
  detail::require_finite(k2, t + h2);
  const Vec<N> k3 = f(t + h2, detail::axpy(x, h2, k2));
  detail::require_finite(k3, t + h2);
  const Vec<N> k4 = f(t + dt, detail::axpy(x, dt, k3));
  detail::require_finite(k4, t + dt);
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace gtppo::dynamics
