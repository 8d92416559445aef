#pragma once

#include <string>

#include "gtppo/dynamics/rocket.hpp"

namespace gtppo::orbital {

using dynamics::Vec3;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDeg = kPi / 180.0;

// Angles in radians; raan and argp in [0, 2 pi), i in [0, pi].
struct OrbitalElements {
  double a = 0.0;
  double e = 0.0;
  double i = 0.0;
  double raan = 0.0;
  double argp = 0.0;
};

struct TargetOrbit : OrbitalElements {
  TargetOrbit() : OrbitalElements{24361.14e3, 0.7308, 28.5 * kDeg, 269.8 * kDeg, 130.5 * kDeg} {}
  TargetOrbit(const OrbitalElements& el) : OrbitalElements(el) {}
};

enum class ElementStatus { ok, hyperbolic, degenerate };

struct ElementsResult {
  ElementStatus status = ElementStatus::degenerate;
  OrbitalElements elements;
  double true_anomaly = 0.0;
  Vec3 h{};  // specific angular momentum
  Vec3 e_vec{};
  bool ok() const { return status == ElementStatus::ok; }
};

// Elliptical classical elements from an inertial state. Circular orbits take
// argp = 0 (true anomaly then measured from the node); equatorial orbits take
// raan = 0 (argp then measured from +x).
ElementsResult state_to_elements(const Vec3& r, const Vec3& v, double mu);

struct CartesianState {
  Vec3 r{};
  Vec3 v{};
};

CartesianState elements_to_state(const OrbitalElements& el, double true_anomaly, double mu);

// Smallest separation of two angles, in [0, pi].
double angle_difference(double a, double b);

// [relative a error, relative e error, |di|, |d raan|, |d argp|]
struct ElementErrors {
  double a = 0.0;
  double e = 0.0;
  double i = 0.0;
  double raan = 0.0;
  double argp = 0.0;
};

ElementErrors element_errors(const OrbitalElements& el, const OrbitalElements& target);

}  // namespace gtppo::orbital
