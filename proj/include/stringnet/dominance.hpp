#pragma once

#include "stringnet/core.hpp"
#include "stringnet/dynamics.hpp"
#include "stringnet/spherical.hpp"

#include <functional>
#include <ostream>

namespace stringnet {

/// Inputs of the dominance-region estimate.
struct DominanceParams {
  double delta = 20.0;            // soft-max order, >= 2
  double gather_margin = 5.0;     // required slack between arrivals [s]
  double planar_radius = 0.0;     // radius of the planar gathering formation
  double max_swarm_radius = 0.0;  // largest attacker swarm radius
  double attacker_max_accel = 1.0;
  double defender_max_accel = 2.0;
  double drag_coeff = 0.01;
  double protected_radius = 1.0;

  int grid_points = 200;
  double grad_tol_scale = 1e-8;
  int max_iterations = 100000;

  double attacker_speed_bound() const {
    return speed_bound(attacker_max_accel, drag_coeff);
  }

  void validate() const {
    if (!(delta >= 2.0)) throw Error("DominanceParams: delta must be >= 2");
    if (!(gather_margin > 0.0) || !(planar_radius > 0.0) ||
        !(max_swarm_radius > 0.0) || !(protected_radius > 0.0))
      throw Error("DominanceParams: lengths and times must be > 0");
    if (!(attacker_max_accel > 0.0) || !(defender_max_accel > 0.0) ||
        !(drag_coeff > 0.0))
      throw Error("DominanceParams: motion parameters must be > 0");
  }
};

/// Law-of-cosines distance from a defender at spherical (R_j, theta, phi) to
/// the point at radius R along the attack direction.
inline double distance_to_gather_point(double R, const SphericalPoint& defender,
                                       double theta_ac, double phi_ac) {
  const double lam =
      central_angle_cosine(phi_ac - defender.azimuth, theta_ac, defender.polar);
  const double rj = defender.radius;
  return std::sqrt(std::max(0.0, R * R + rj * rj - 2.0 * R * rj * lam));
}

/// delta-norm upper bound of max(values), computed in the log domain.
inline double soft_max(const std::vector<double>& values, double delta) {
  if (values.empty()) throw Error("soft_max: empty list");
  if (!(delta >= 1.0)) throw Error("soft_max: delta must be >= 1");
  double m = 0.0;
  for (double v : values) {
    if (v < 0.0) throw Error("soft_max: values must be non-negative");
    m = std::max(m, v);
  }
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double v : values) s += std::pow(v / m, delta);
  return m * std::pow(s, 1.0 / delta);
}

/// Rest-to-rest time over a straight distance under max thrust with
/// quadratic drag (accelerate to the switching speed, then full reverse).
inline double travel_time_bound(double distance, double u_max, double c_d) {
  if (!(u_max > 0.0) || !(c_d > 0.0))
    throw Error("travel_time_bound: u_max and c_d must be > 0");
  if (distance < 0.0) throw Error("travel_time_bound: negative distance");
  if (distance == 0.0) return 0.0;
  const double lam0 = std::sqrt(u_max * c_d);
  const double em1 = std::expm1(2.0 * c_d * distance);  // lambda - 1
  const double lam_p1 = em1 + 2.0;                      // lambda + 1
  const double s = std::sqrt(em1 / lam_p1);             // v_sw / v_bar
  // atanh(s) with 1 - s^2 = 2/(lambda+1) substituted for stability.
  const double atanh_s = 0.5 * std::log((1.0 + s) * (1.0 + s) * lam_p1 / 2.0);
  return (atanh_s + std::atan(s)) / lam0;
}

/// d/dx of travel_time_bound at distance x > 0.
inline double travel_time_bound_derivative(double distance, double u_max, double c_d) {
  const double lam0 = std::sqrt(u_max * c_d);
  const double em1 = std::expm1(2.0 * c_d * distance);
  const double lam_p1 = em1 + 2.0;
  return (c_d / lam0) * std::sqrt(lam_p1 / em1);
}

namespace detail {

struct GatherDistance {
  double value = 0.0;       // soft-max of defender distances
  double derivative = 0.0;  // d(soft-max)/dR
};

inline GatherDistance soft_max_distance(double R, const Vec3& dir,
                                        const std::vector<Vec3>& defenders,
                                        double delta) {
  std::vector<double> rho(defenders.size());
  std::vector<double> proj(defenders.size());
  double m = 0.0;
  for (size_t j = 0; j < defenders.size(); ++j) {
    proj[j] = dir.dot(defenders[j]);
    rho[j] = std::max((R * dir - defenders[j]).norm(), 1e-9);
    m = std::max(m, rho[j]);
  }
  double s = 0.0;
  for (double v : rho) s += std::pow(v / m, delta);
  GatherDistance g;
  g.value = m * std::pow(s, 1.0 / delta);
  for (size_t j = 0; j < defenders.size(); ++j)
    g.derivative +=
        std::pow(rho[j] / g.value, delta - 1.0) * (R - proj[j]) / rho[j];
  return g;
}

}  // namespace detail

/// Attacker start distance along dir for which gathering at radius R meets
/// the margin exactly: rho_bar_ac + R + v_a * (T_bound + margin).
inline double required_attack_distance(double R, const Vec3& dir,
                                       const std::vector<Vec3>& defenders,
                                       const DominanceParams& p) {
  const auto g = detail::soft_max_distance(R, dir, defenders, p.delta);
  const double t =
      travel_time_bound(g.value + p.planar_radius, p.defender_max_accel, p.drag_coeff);
  return p.max_swarm_radius + R +
         p.attacker_speed_bound() * (t + p.gather_margin);
}

inline double required_attack_distance_derivative(double R, const Vec3& dir,
                                                  const std::vector<Vec3>& defenders,
                                                  const DominanceParams& p) {
  const auto g = detail::soft_max_distance(R, dir, defenders, p.delta);
  const double tprime = travel_time_bound_derivative(
      g.value + p.planar_radius, p.defender_max_accel, p.drag_coeff);
  return 1.0 + p.attacker_speed_bound() * tprime * g.derivative;
}

struct MinAttackRadius {
  double radius = 0.0;         // minimal attacker distance with the margin
  double gather_radius = 0.0;  // minimizing gathering radius R
};

namespace detail {

inline void check_not_colocated(const std::vector<Vec3>& defenders) {
  for (size_t i = 0; i < defenders.size(); ++i)
    for (size_t j = i + 1; j < defenders.size(); ++j)
      if ((defenders[i] - defenders[j]).norm() < 1e-9)
        throw Error("min_required_attack_distance: degenerate defenders (co-located)");
}

inline double golden_min(const std::function<double(double)>& f, double lo,
                         double hi, double tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Minimizes the required attack distance over the gathering radius
/// R in (protected_radius, hi]. Descends from the minimizer of the soft-max
/// distance and from the best point of a coarse grid; keeps the better.
inline MinAttackRadius min_required_attack_distance(const Vec3& direction,
                                                    const std::vector<Vec3>& defenders,
                                                    const DominanceParams& p,
                                                    double hi = 0.0) {
  p.validate();
  if (defenders.empty()) throw Error("min_required_attack_distance: no defenders");
  detail::check_not_colocated(defenders);
  const Vec3 dir = direction.normalized();

  const double lo = p.protected_radius * (1.0 + 1e-9) + 1e-12;
  if (hi <= 0.0) {
    double max_rj = 0.0;
    for (const auto& d : defenders) max_rj = std::max(max_rj, d.norm());
    hi = 1.5 * max_rj + p.protected_radius + p.planar_radius + 1.0;
  }
  if (!(hi > lo)) throw Error("min_required_attack_distance: infeasible interval");

  auto f = [&](double R) { return required_attack_distance(R, dir, defenders, p); };
  auto fp = [&](double R) {
    return required_attack_distance_derivative(R, dir, defenders, p);
  };

  auto descend = [&](double R) {
    const double grad_tol = p.grad_tol_scale * p.attacker_speed_bound();
    double fR = f(R);
    double step = 0.01 * p.protected_radius;
    for (int it = 0; it < p.max_iterations; ++it) {
      const double g = fp(R);
      if (std::abs(g) < grad_tol) break;
      bool accepted = false;
      double t = step;
      for (int bt = 0; bt < 60; ++bt) {
        const double trial = std::clamp(R - t * g, lo, hi);
        const double f_trial = f(trial);
        if (f_trial <= fR - 1e-4 * t * g * g || (trial == lo && f_trial <= fR) ||
            (trial == hi && f_trial <= fR)) {
          if (trial == R) { accepted = false; break; }  // pinned at a bound
          R = trial;
          fR = f_trial;
          step = std::min(t * 1.5, 0.01 * p.protected_radius * 100.0);
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;
    }
    return std::pair<double, double>(fR, R);
  };

  // Start 1: minimizer of the soft-max distance itself.
  auto soft = [&](double R) {
    return detail::soft_max_distance(R, dir, defenders, p.delta).value;
  };
  const double r_star =
      detail::golden_min(soft, lo, hi, 1e-10 * (hi - lo));
  auto best = descend(r_star);

  // Start 2: best point of a coarse global grid.
  double grid_best_r = lo, grid_best_f = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= p.grid_points; ++k) {
    const double R = lo + (hi - lo) * k / static_cast<double>(p.grid_points);
    const double v = f(R);
    if (v < grid_best_f) { grid_best_f = v; grid_best_r = R; }
  }
  const auto from_grid = descend(grid_best_r);
  if (from_grid.first < best.first) best = from_grid;

  return {best.first, best.second};
}

/// Per-direction minimal attacker radii on a latitude-longitude grid.
struct DominanceBoundary {
  std::vector<double> thetas;  // inclusive [0, pi]
  std::vector<double> phis;    // [-pi, pi), wraps
  std::vector<std::vector<double>> radii;          // [theta][phi]
  std::vector<std::vector<double>> gather_radii;   // matching R minimizers

  /// Conservative membership: compares |p| against the largest radius of the
  /// surrounding grid cell.
  bool in_dom_est(const Vec3& p) const {
    const SphericalPoint s = to_spherical(p);
    const int nt = static_cast<int>(thetas.size());
    const int np = static_cast<int>(phis.size());
    const double dt = M_PI / (nt - 1);
    const double dphi = 2.0 * M_PI / np;
    const int it = std::clamp(static_cast<int>(std::floor(s.polar / dt)), 0, nt - 2);
    int ip = static_cast<int>(std::floor((s.azimuth + M_PI) / dphi));
    ip = std::clamp(ip, 0, np - 1);
    const int ipn = (ip + 1) % np;
    const double bound =
        std::max({radii[it][ip], radii[it][ipn], radii[it + 1][ip], radii[it + 1][ipn]});
    return s.radius >= bound;
  }
};

inline DominanceBoundary dominance_boundary(const std::vector<Vec3>& defenders,
                                            const DominanceParams& p, int n_theta,
                                            int n_phi) {
  if (n_theta < 8 || n_phi < 8)
    throw Error("dominance_boundary: grid must be at least 8x8");
  DominanceBoundary b;
  b.thetas.resize(n_theta);
  b.phis.resize(n_phi);
  for (int i = 0; i < n_theta; ++i) b.thetas[i] = M_PI * i / (n_theta - 1);
  for (int j = 0; j < n_phi; ++j) b.phis[j] = -M_PI + 2.0 * M_PI * j / n_phi;
  b.radii.assign(n_theta, std::vector<double>(n_phi, 0.0));
  b.gather_radii.assign(n_theta, std::vector<double>(n_phi, 0.0));
  for (int i = 0; i < n_theta; ++i) {
    for (int j = 0; j < n_phi; ++j) {
      SphericalPoint dir{1.0, b.thetas[i], b.phis[j]};
      try {
        const auto r = min_required_attack_distance(to_cartesian(dir), defenders, p);
        b.radii[i][j] = r.radius;
        b.gather_radii[i][j] = r.gather_radius;
      } catch (const Error& e) {
        throw Error("dominance_boundary: direction (theta=" +
                    std::to_string(b.thetas[i]) + ", phi=" + std::to_string(b.phis[j]) +
                    "): " + e.what());
      }
    }
  }
  return b;
}

inline void write_boundary_csv(std::ostream& os, const DominanceBoundary& b) {
  os << "theta,phi,r_min\n";
  os.precision(17);
  for (size_t i = 0; i < b.thetas.size(); ++i)
    for (size_t j = 0; j < b.phis.size(); ++j)
      os << b.thetas[i] << ',' << b.phis[j] << ',' << b.radii[i][j] << '\n';
}

}  // namespace stringnet
