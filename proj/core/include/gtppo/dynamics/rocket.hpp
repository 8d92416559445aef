#pragma once

#include <array>
#include <vector>

#include "gtppo/dynamics/integrator.hpp"

namespace gtppo::dynamics {

using Vec3 = Vec<3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

struct PhysicalConstants {
  double mu = 3.986e14;
  double R_e = 6378145.0;
  double H = 7200.0;
  double rho0 = 1.225;
  double omega_e = 7.2921159e-5;
  double g0 = 9.80665;
  double psi_l = 28.5 * 3.14159265358979323846 / 180.0;

  void validate() const;
};

struct Component {
  double total_mass = 0.0;
  double propellant_mass = 0.0;
  double thrust = 0.0;  // per engine
  double isp = 0.0;
  double burn_time = 0.0;
  int engines = 1;

  double dry_mass() const { return total_mass - propellant_mass; }
  double mdot(double g0) const { return thrust / (g0 * isp); }  // per engine, kg/s
};

struct VehicleConfig {
  Component srb{19290.0, 17010.0, 628500.0, 284.0, 75.2, 9};
  Component stage1{104380.0, 95550.0, 1083100.0, 301.7, 261.0, 1};
  Component stage2{19300.0, 16820.0, 110094.0, 462.4, 700.0, 1};
  double cd = 0.5;
  double area = 4.0 * 3.14159265358979323846;
  double payload = 4164.0;

  double initial_mass() const;
  void validate() const;
};

// Phase p spans [boundaries[p], boundaries[p+1]). Jettison happens on reaching
// boundaries[1..n-1].
struct PhaseSchedule {
  std::vector<double> boundaries{0.0, 75.2, 150.4, 261.0, 961.0};
  std::vector<int> srbs_per_phase{6, 3, 0, 0};
  std::vector<bool> stage1_active{true, true, true, false};
  std::vector<bool> stage2_active{false, false, false, true};

  int n_phases() const { return static_cast<int>(boundaries.size()) - 1; }
  double horizon() const { return boundaries.back(); }
  int phase_at(double t) const;
  // Mass released at interior boundary b (1-based boundary index).
  double jettison_mass(int boundary, const VehicleConfig& v) const;
  void validate(const VehicleConfig& v) const;
};

struct ThrustLevel {
  double thrust = 0.0;  // N
  double mdot = 0.0;    // kg/s
  int phase = 0;
};

// Nominal thrust and mass flow of the engines active at time t.
ThrustLevel thrust_profile(double t, const VehicleConfig& v, const PhaseSchedule& s,
                           const PhysicalConstants& c = PhysicalConstants{});

double atmosphere_density(double h, const PhysicalConstants& c);
Vec3 drag_force(const Vec3& r, const Vec3& v, const VehicleConfig& cfg, const PhysicalConstants& c);

// [r, v, m]
using RocketVec = Vec<7>;

// Derivative with thrust, drag and point-mass gravity. Thrust is zeroed when
// the mass is at or below `dry_floor`.
RocketVec rocket_derivative(const RocketVec& s, const Vec3& u_hat, const ThrustLevel& thrust, double dry_floor,
                            const VehicleConfig& cfg, const PhysicalConstants& c);

// Mass after the staging event at t_new, or m unchanged away from boundaries.
double apply_staging(double m, double t_new, const VehicleConfig& v, const PhaseSchedule& s);

struct RocketState {
  Vec3 r{};
  Vec3 v{};
  double m = 0.0;
  double t = 0.0;
  // Remaining propellant: SRB group burning in each SRB phase, stage 1, stage 2.
  std::vector<double> srb_propellant;
  double stage1_propellant = 0.0;
  double stage2_propellant = 0.0;

  RocketVec packed() const { return {r[0], r[1], r[2], v[0], v[1], v[2], m}; }
};

struct StagingEvent {
  double t = 0.0;
  double mass_before = 0.0;
  double mass_after = 0.0;
};

// Launch pad at latitude psi_l, longitude 0, at rest relative to the ground.
RocketState launch_state(const VehicleConfig& v, const PhaseSchedule& s, const PhysicalConstants& c);

// Thrust actually available given remaining propellant.
ThrustLevel available_thrust(const RocketState& st, const VehicleConfig& v, const PhaseSchedule& s,
                             const PhysicalConstants& c);

// Advances by dt with u_hat held fixed. The interval is split at phase
// boundaries (staging applied on arrival) and at propellant depletion, with
// one RK4 step per piece.
std::vector<StagingEvent> propagate_rocket(RocketState& st, const Vec3& u_hat, double dt, const VehicleConfig& v,
                                           const PhaseSchedule& s, const PhysicalConstants& c);

}  // namespace gtppo::dynamics
