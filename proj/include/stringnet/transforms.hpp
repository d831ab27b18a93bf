#pragma once

#include "stringnet/core.hpp"
#include "stringnet/spherical.hpp"

namespace stringnet {

/// Rigid placement of a formation: translation plus unit quaternion
/// (scalar-last storage), body frame to world frame.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  void validate() const {
    if (std::abs(orientation.norm() - 1.0) > 1e-9)
      throw Error("Pose: quaternion not unit length");
  }
};

/// Halves the azimuth, folding the full sphere onto the azimuth range
/// [-pi/2, pi/2]. Azimuth exactly at the cut is wrapped to +pi first.
inline SphericalPoint map_sphere_to_hemisphere(const SphericalPoint& p) {
  SphericalPoint q = p;
  q.azimuth = 0.5 * (p.azimuth == -M_PI ? M_PI : p.azimuth);
  return q;
}

/// Fixed 90-degree rotation about the y-axis: (x, y, z) -> (z, y, -x).
inline Vec3 rotate_to_primed(const Vec3& p) {
  return Vec3(p.z(), p.y(), -p.x());
}

struct PolarPoint {
  double radius = 0.0;
  double azimuth = 0.0;
};

/// Flattens a point of the primed hemisphere onto the plane, scaling the
/// planar radius by k_pl.
inline PolarPoint map_hemisphere_to_plane(const SphericalPoint& p, double k_pl) {
  if (!(k_pl > 0.0)) throw Error("map_hemisphere_to_plane: k_pl must be > 0");
  return {k_pl * p.radius * std::sin(p.polar), p.azimuth};
}

inline Vec3 planar_embed(const PolarPoint& p) {
  return Vec3(p.radius * std::cos(p.azimuth), p.radius * std::sin(p.azimuth), 0.0);
}

/// Largest admissible planar scaling R_bar_sb / R_hs_max; > 1 whenever the
/// source mesh satisfies the edge constraint.
inline double max_planar_scale(double r_bar_sb, double r_hs_max) {
  if (!(r_bar_sb > 0.0) || !(r_hs_max > 0.0))
    throw Error("max_planar_scale: inputs must be > 0");
  if (r_hs_max >= r_bar_sb)
    throw Error("max_planar_scale: inconsistent mesh (hemispherical edge >= limit)");
  return r_bar_sb / r_hs_max;
}

/// World positions r + R(q) * xi_l for all relative positions.
inline std::vector<Vec3> place(const std::vector<Vec3>& relative, const Pose& pose) {
  pose.validate();
  std::vector<Vec3> out(relative.size());
  for (size_t i = 0; i < relative.size(); ++i)
    out[i] = pose.position + pose.orientation * relative[i];
  return out;
}

/// Unit quaternion rotating the body z-axis onto (to - from). Minimal
/// rotation; the antipodal case flips about x.
inline Quat orientation_towards(const Vec3& from, const Vec3& to) {
  const Vec3 d = to - from;
  const double n = d.norm();
  if (n < 1e-12) throw Error("orientation_towards: coincident points");
  const Vec3 dir = d / n;
  if (dir.z() < -1.0 + 1e-14) return Quat(0.0, 1.0, 0.0, 0.0);  // 180 deg about x
  return Quat::FromTwoVectors(Vec3::UnitZ(), dir).normalized();
}

}  // namespace stringnet
