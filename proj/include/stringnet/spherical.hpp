#pragma once

#include "stringnet/core.hpp"

namespace stringnet {

/// Point in spherical coordinates: radius, polar angle from +z in [0, pi],
/// azimuth in (-pi, pi].
struct SphericalPoint {
  double radius = 0.0;
  double polar = 0.0;
  double azimuth = 0.0;
};

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a <= 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}

/// Cosine of the central angle between directions (theta_i, phi_i) and
/// (theta_j, phi_j), given dphi = phi_i - phi_j.
inline double central_angle_cosine(double dphi, double theta_i, double theta_j) {
  return std::cos(dphi) * std::sin(theta_i) * std::sin(theta_j) +
         std::cos(theta_i) * std::cos(theta_j);
}

inline Vec3 to_cartesian(const SphericalPoint& p) {
  const double st = std::sin(p.polar);
  return p.radius * Vec3(st * std::cos(p.azimuth), st * std::sin(p.azimuth),
                         std::cos(p.polar));
}

inline SphericalPoint to_spherical(const Vec3& v) {
  SphericalPoint p;
  p.radius = v.norm();
  if (p.radius == 0.0) return p;
  p.polar = std::acos(std::clamp(v.z() / p.radius, -1.0, 1.0));
  p.azimuth = std::atan2(v.y(), v.x());
  if (p.azimuth == -M_PI) p.azimuth = M_PI;
  return p;
}

/// Chord length between two points on a common sphere of radius rho.
inline double chord_length(double rho, const SphericalPoint& a, const SphericalPoint& b) {
  const double lam = central_angle_cosine(a.azimuth - b.azimuth, a.polar, b.polar);
  return rho * std::sqrt(std::max(0.0, 2.0 - 2.0 * lam));
}

}  // namespace stringnet
