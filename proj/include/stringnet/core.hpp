#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace stringnet {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;  // coeffs stored scalar-last [x,y,z,w]

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

/// ||x||^alpha * x/||x||, the continuous fractional-power feedback term.
/// Returns zero at x = 0 (the limit for alpha > 0).
inline Vec3 sig_pow(const Vec3& x, double alpha) {
  const double n = x.norm();
  if (n <= 0.0) return Vec3::Zero();
  return std::pow(n, alpha - 1.0) * x;
}

/// Deterministic seed mixing (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace stringnet
