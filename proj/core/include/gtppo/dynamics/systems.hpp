#pragma once

#include "gtppo/dynamics/integrator.hpp"

namespace gtppo::dynamics {

using State2 = Vec<2>;

// x1'' = u
State2 di_derivative(const State2& x, double u);

// x1'' = -x1 + eps (1 - x1^2) x1' + u
State2 vdp_derivative(const State2& x, double u, double eps);

State2 di_step(const State2& x, double u, double dt);
State2 vdp_step(const State2& x, double u, double eps, double dt);

}  // namespace gtppo::dynamics
