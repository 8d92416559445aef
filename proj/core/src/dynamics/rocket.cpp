#include "gtppo/dynamics/rocket.hpp"

#include <algorithm>
#include <string>

namespace gtppo::dynamics {

namespace {
constexpr double kTimeTol = 1e-9;
constexpr double kPropellantTol = 1e-9;

void positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
}

void check_component(const Component& c, const char* name) {
  const std::string n(name);
  positive(c.total_mass, (n + ".total_mass").c_str());
  positive(c.thrust, (n + ".thrust").c_str());
  positive(c.isp, (n + ".isp").c_str());
  if (!(c.propellant_mass > 0.0 && c.propellant_mass < c.total_mass)) {
    throw ConfigError(n + ".propellant_mass must lie in (0, total_mass)");
  }
  if (c.engines <= 0) throw ConfigError(n + ".engines must be positive");
}
}  // namespace

void PhysicalConstants::validate() const {
  positive(mu, "mu");
  positive(R_e, "R_e");
  positive(H, "H");
  positive(rho0, "rho0");
  positive(omega_e, "omega_e");
  positive(g0, "g0");
  positive(psi_l, "psi_l");
}

double VehicleConfig::initial_mass() const {
  return payload + stage2.total_mass + stage1.total_mass + srb.engines * srb.total_mass;
}

void VehicleConfig::validate() const {
  check_component(srb, "srb");
  check_component(stage1, "stage1");
  check_component(stage2, "stage2");
  positive(cd, "cd");
  positive(area, "area");
  positive(payload, "payload");
}

int PhaseSchedule::phase_at(double t) const {
  if (t < boundaries.front() - kTimeTol || t > boundaries.back() + kTimeTol) {
    throw ConfigError("time " + std::to_string(t) + " s outside the phase schedule [" +
                      std::to_string(boundaries.front()) + ", " + std::to_string(boundaries.back()) + "]");
  }
  int p = 0;
  while (p + 1 < n_phases() && t >= boundaries[p + 1] - kTimeTol) ++p;
  return p;
}

double PhaseSchedule::jettison_mass(int boundary, const VehicleConfig& v) const {
  if (boundary <= 0 || boundary >= n_phases()) return 0.0;
  const int before = boundary - 1;
  double m = srbs_per_phase[before] * v.srb.dry_mass();
  if (stage1_active[before] && !stage1_active[boundary]) m += v.stage1.dry_mass();
  return m;
}

void PhaseSchedule::validate(const VehicleConfig& v) const {
  const int n = n_phases();
  if (n < 1) throw ConfigError("phase schedule needs at least two boundaries");
  for (int i = 0; i < n; ++i) {
    if (!(boundaries[i + 1] > boundaries[i])) throw ConfigError("phase boundaries must be strictly increasing");
  }
  if (static_cast<int>(srbs_per_phase.size()) != n || static_cast<int>(stage1_active.size()) != n ||
      static_cast<int>(stage2_active.size()) != n) {
    throw ConfigError("per-phase engine lists must have one entry per phase");
  }
  int srbs = 0;
  for (int k : srbs_per_phase) srbs += k;
  if (srbs != v.srb.engines) throw ConfigError("per-phase SRB counts must add up to srb.engines");
  for (int b = 1; b < n; ++b) {
    if (!(jettison_mass(b, v) > 0.0)) {
      throw ConfigError("no mass is jettisoned at boundary " + std::to_string(boundaries[b]) + " s");
    }
  }
}

ThrustLevel thrust_profile(double t, const VehicleConfig& v, const PhaseSchedule& s, const PhysicalConstants& c) {
  ThrustLevel out;
  out.phase = s.phase_at(t);
  const int p = out.phase;
  auto add = [&](const Component& comp, int engines) {
    out.thrust += engines * comp.thrust;
    out.mdot += engines * comp.mdot(c.g0);
  };
  if (s.srbs_per_phase[p] > 0) add(v.srb, s.srbs_per_phase[p]);
  if (s.stage1_active[p]) add(v.stage1, 1);
  if (s.stage2_active[p]) add(v.stage2, 1);
  return out;
}

double atmosphere_density(double h, const PhysicalConstants& c) { return c.rho0 * std::exp(-h / c.H); }

Vec3 drag_force(const Vec3& r, const Vec3& v, const VehicleConfig& cfg, const PhysicalConstants& c) {
  const double rn = norm(r);
  if (!(rn > 0.0)) throw ConfigError("drag_force: zero position vector");
  const Vec3 omega{0.0, 0.0, c.omega_e};
  const Vec3 v_rel = v - cross(omega, r);
  const double rho = atmosphere_density(rn - c.R_e, c);
  return (-0.5 * rho * cfg.cd * cfg.area * norm(v_rel)) * v_rel;
}

RocketVec rocket_derivative(const RocketVec& s, const Vec3& u_hat, const ThrustLevel& thrust, double dry_floor,
                            const VehicleConfig& cfg, const PhysicalConstants& c) {
  const Vec3 r{s[0], s[1], s[2]};
  const Vec3 v{s[3], s[4], s[5]};
  const double m = s[6];
  const double rn = norm(r);
  const bool burning = m > dry_floor && thrust.thrust > 0.0;
  const double T = burning ? thrust.thrust : 0.0;
  const double mdot = burning ? thrust.mdot : 0.0;
  const Vec3 d = drag_force(r, v, cfg, c);
  const double g = -c.mu / (rn * rn * rn);
  RocketVec out;
  for (int i = 0; i < 3; ++i) {
    out[i] = v[i];
    out[3 + i] = g * r[i] + T / m * u_hat[i] + d[i] / m;
  }
  out[6] = -mdot;
  return out;
}

double apply_staging(double m, double t_new, const VehicleConfig& v, const PhaseSchedule& s) {
  for (int b = 1; b < s.n_phases(); ++b) {
    if (std::fabs(t_new - s.boundaries[b]) <= kTimeTol) {
      const double out = m - s.jettison_mass(b, v);
      if (!(out > v.payload)) {
        throw ConfigError("staging at " + std::to_string(s.boundaries[b]) + " s leaves " + std::to_string(out) +
                          " kg, not above the payload mass");
      }
      return out;
    }
  }
  return m;
}

RocketState launch_state(const VehicleConfig& v, const PhaseSchedule& s, const PhysicalConstants& c) {
  RocketState st;
  st.r = {c.R_e * std::cos(c.psi_l), 0.0, c.R_e * std::sin(c.psi_l)};
  st.v = cross(Vec3{0.0, 0.0, c.omega_e}, st.r);
  st.m = v.initial_mass();
  st.t = s.boundaries.front();
  st.srb_propellant.resize(s.n_phases());
  for (int p = 0; p < s.n_phases(); ++p) st.srb_propellant[p] = s.srbs_per_phase[p] * v.srb.propellant_mass;
  st.stage1_propellant = v.stage1.propellant_mass;
  st.stage2_propellant = v.stage2.propellant_mass;
  return st;
}

namespace {

// Mass flow of each propellant pool active at phase p, in the order
// SRB group, stage 1, stage 2 (zero when inactive or empty).
std::array<double, 3> pool_flows(const RocketState& st, int p, const VehicleConfig& v, const PhaseSchedule& s,
                                 const PhysicalConstants& c) {
  std::array<double, 3> f{0.0, 0.0, 0.0};
  if (s.srbs_per_phase[p] > 0 && st.srb_propellant[p] > kPropellantTol) f[0] = s.srbs_per_phase[p] * v.srb.mdot(c.g0);
  if (s.stage1_active[p] && st.stage1_propellant > kPropellantTol) f[1] = v.stage1.mdot(c.g0);
  if (s.stage2_active[p] && st.stage2_propellant > kPropellantTol) f[2] = v.stage2.mdot(c.g0);
  return f;
}

}  // namespace

ThrustLevel available_thrust(const RocketState& st, const VehicleConfig& v, const PhaseSchedule& s,
                             const PhysicalConstants& c) {
  ThrustLevel out;
  out.phase = s.phase_at(st.t);
  const auto f = pool_flows(st, out.phase, v, s, c);
  if (f[0] > 0.0) out.thrust += s.srbs_per_phase[out.phase] * v.srb.thrust;
  if (f[1] > 0.0) out.thrust += v.stage1.thrust;
  if (f[2] > 0.0) out.thrust += v.stage2.thrust;
  out.mdot = f[0] + f[1] + f[2];
  return out;
}

std::vector<StagingEvent> propagate_rocket(RocketState& st, const Vec3& u_hat, double dt, const VehicleConfig& v,
                                           const PhaseSchedule& s, const PhysicalConstants& c) {
  if (!(dt > 0.0)) throw ConfigError("propagate_rocket: dt must be positive");
  std::vector<StagingEvent> events;
  const double t_end = std::min(st.t + dt, s.horizon());
  while (st.t < t_end - kTimeTol) {
    const int p = s.phase_at(st.t);
    const double next_boundary = s.boundaries[p + 1];
    const auto flows = pool_flows(st, p, v, s, c);
    const ThrustLevel thrust = available_thrust(st, v, s, c);
    double* pools[3] = {&st.srb_propellant[p], &st.stage1_propellant, &st.stage2_propellant};

    double t1 = std::min(t_end, next_boundary);
    int depleting = -1;
    for (int i = 0; i < 3; ++i) {
      if (flows[i] > 0.0 && st.t + *pools[i] / flows[i] < t1) {
        t1 = st.t + *pools[i] / flows[i];
        depleting = i;
      }
    }
    const double h = t1 - st.t;
    double onboard = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (flows[i] > 0.0) onboard += *pools[i];
    }
    const double floor = st.m - onboard - 1e-3;
    const RocketVec x = rk4_step(
        [&](double, const RocketVec& y) { return rocket_derivative(y, u_hat, thrust, floor, v, c); }, st.packed(),
        st.t, h);
    st.r = {x[0], x[1], x[2]};
    st.v = {x[3], x[4], x[5]};
    st.m = x[6];
    for (int i = 0; i < 3; ++i) {
      if (flows[i] > 0.0) *pools[i] = i == depleting ? 0.0 : std::max(0.0, *pools[i] - flows[i] * h);
    }
    st.t = t1;
    if (std::fabs(t1 - next_boundary) <= kTimeTol && p + 1 < s.n_phases()) {
      st.t = next_boundary;
      StagingEvent e{next_boundary, st.m, 0.0};
      st.m = apply_staging(st.m, next_boundary, v, s);
      e.mass_after = st.m;
      events.push_back(e);
    }
  }
  st.t = t_end;
  return events;
}

}  // namespace gtppo::dynamics
