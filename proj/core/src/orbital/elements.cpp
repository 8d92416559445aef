#include "gtppo/orbital/elements.hpp"

#include <cmath>

namespace gtppo::orbital {

using dynamics::cross;
using dynamics::dot;
using dynamics::norm;
using dynamics::operator*;
using dynamics::operator-;

namespace {
constexpr double kSingular = 1e-8;

double wrap_2pi(double x) {
  double w = std::fmod(x, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  if (w >= 2.0 * kPi) w = 0.0;
  return w;
}
}  // namespace

ElementsResult state_to_elements(const Vec3& r, const Vec3& v, double mu) {
  ElementsResult out;
  const double rn = norm(r);
  if (!(rn > 0.0)) return out;
  const Vec3 h = cross(r, v);
  const double hn = norm(h);
  out.h = h;
  if (hn <= kSingular * rn * norm(v) || hn == 0.0) return out;

  const double v2 = dot(v, v);
  const double energy = 0.5 * v2 - mu / rn;
  out.e_vec = (1.0 / mu) * ((v2 - mu / rn) * r - dot(r, v) * v);
  if (!(energy < 0.0)) {
    out.status = ElementStatus::hyperbolic;
    return out;
  }
  OrbitalElements& el = out.elements;
  el.a = -mu / (2.0 * energy);
  el.e = norm(out.e_vec);
  el.i = std::atan2(std::hypot(h[0], h[1]), h[2]);

  const Vec3 hh = (1.0 / hn) * h;
  const Vec3 node{-h[1], h[0], 0.0};
  const double nn = norm(node);
  const bool equatorial = nn <= kSingular * hn;
  const bool circular = el.e < kSingular;
  // Reference direction in the orbit plane from which argp is measured.
  Vec3 ref = equatorial ? Vec3{1.0, 0.0, 0.0} : (1.0 / nn) * node;
  el.raan = equatorial ? 0.0 : wrap_2pi(std::atan2(node[1], node[0]));
  auto plane_angle = [&](const Vec3& from, const Vec3& to) {
    return std::atan2(dot(cross(from, to), hh), dot(from, to));
  };
  if (circular) {
    el.argp = 0.0;
    out.true_anomaly = wrap_2pi(plane_angle(ref, r));
  } else {
    el.argp = wrap_2pi(plane_angle(ref, out.e_vec));
    out.true_anomaly = wrap_2pi(plane_angle(out.e_vec, r));
  }
  out.status = ElementStatus::ok;
  return out;
}

CartesianState elements_to_state(const OrbitalElements& el, double nu, double mu) {
  const double p = el.a * (1.0 - el.e * el.e);
  const double rp = p / (1.0 + el.e * std::cos(nu));
  const double vs = std::sqrt(mu / p);
  const Vec3 r_pf{rp * std::cos(nu), rp * std::sin(nu), 0.0};
  const Vec3 v_pf{-vs * std::sin(nu), vs * (el.e + std::cos(nu)), 0.0};
  const double cO = std::cos(el.raan), sO = std::sin(el.raan);
  const double ci = std::cos(el.i), si = std::sin(el.i);
  const double cw = std::cos(el.argp), sw = std::sin(el.argp);
  const double m[3][2] = {
      {cO * cw - sO * sw * ci, -cO * sw - sO * cw * ci},
      {sO * cw + cO * sw * ci, -sO * sw + cO * cw * ci},
      {sw * si, cw * si},
  };
  CartesianState s;
  for (int k = 0; k < 3; ++k) {
    s.r[k] = m[k][0] * r_pf[0] + m[k][1] * r_pf[1];
    s.v[k] = m[k][0] * v_pf[0] + m[k][1] * v_pf[1];
  }
  return s;
}

double angle_difference(double a, double b) {
  double d = std::fmod(std::fabs(a - b), 2.0 * kPi);
  return d > kPi ? 2.0 * kPi - d : d;
}

ElementErrors element_errors(const OrbitalElements& el, const OrbitalElements& target) {
  ElementErrors err;
  err.a = std::fabs(el.a - target.a) / std::fabs(target.a);
  err.e = target.e != 0.0 ? std::fabs(el.e - target.e) / target.e : std::fabs(el.e);
  err.i = angle_difference(el.i, target.i);
  err.raan = angle_difference(el.raan, target.raan);
  err.argp = angle_difference(el.argp, target.argp);
  return err;
}

}  // namespace gtppo::orbital
