#pragma once

#include "stringnet/core.hpp"
#include "stringnet/spherical.hpp"

#include <random>

namespace stringnet {

/// Electrostatic potential energy of point charges on a sphere, summed over
/// ordered pairs (each pair counted twice).
inline double coulomb_energy(const std::vector<SphericalPoint>& points, double rho) {
  if (points.size() < 2) throw Error("coulomb_energy: need at least 2 points");
  std::vector<Vec3> x(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    SphericalPoint p = points[i];
    p.radius = rho;
    x[i] = to_cartesian(p);
  }
  double e = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    for (size_t j = 0; j < x.size(); ++j) {
      if (i == j) continue;
      const double d = (x[i] - x[j]).norm();
      if (d < 1e-12 * rho)
        throw Error("coulomb_energy: singular configuration (coincident points)");
      e += 1.0 / d;
    }
  }
  return e;
}

struct ThomsonOptions {
  double tol = 1e-8;        // inf-norm of the tangential energy gradient
  int max_iterations = 50000;
  int multi_starts = 4;
  std::uint64_t seed = 0;
};

struct ThomsonResult {
  std::vector<Vec3> points;           // on the sphere of the requested radius
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> energy_trace;   // energies of accepted descent steps
};

namespace detail {

inline double cartesian_energy(const std::vector<Vec3>& x, double rho) {
  double e = 0.0;
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = i + 1; j < x.size(); ++j) {
      const double d = (x[i] - x[j]).norm();
      if (d < 1e-12 * rho) return std::numeric_limits<double>::infinity();
      e += 2.0 / d;
    }
  return e;
}

/// Tangential (sphere-constrained) energy gradient; returns its inf-norm.
inline double tangential_gradient(const std::vector<Vec3>& x, double rho,
                                  std::vector<Vec3>& grad) {
  const size_t n = x.size();
  grad.assign(n, Vec3::Zero());
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const Vec3 d = x[i] - x[j];
      const double r3 = std::pow(d.norm(), 3);
      const Vec3 g = -2.0 * d / r3;  // dE/dx_i for the ordered-pair sum
      grad[i] += g;
      grad[j] -= g;
    }
  }
  double inf = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Vec3 nrm = x[i] / rho;
    grad[i] -= grad[i].dot(nrm) * nrm;
    inf = std::max(inf, grad[i].cwiseAbs().maxCoeff());
  }
  return inf;
}

inline ThomsonResult descend(std::vector<Vec3> x, double rho,
                             const ThomsonOptions& opt) {
  ThomsonResult res;
  const size_t n = x.size();
  std::vector<Vec3> grad, trial(n);
  double energy = cartesian_energy(x, rho);
  res.energy_trace.push_back(energy);
  double ginf = tangential_gradient(x, rho, grad);

  double gnorm2 = 0.0;
  for (const auto& g : grad) gnorm2 += g.squaredNorm();
  double step = (gnorm2 > 0.0) ? 0.05 * rho / std::sqrt(gnorm2 / n) : 1.0;

  int it = 0;
  // Phase 1: Armijo-backtracked projected descent, monotone in energy. Ends
  // when energy decrements sink under double rounding.
  for (; it < opt.max_iterations && ginf >= opt.tol; ++it) {
    bool accepted = false;
    const double prev_energy = energy;
    for (int bt = 0; bt < 60; ++bt) {
      for (size_t i = 0; i < n; ++i)
        trial[i] = rho * (x[i] - step * grad[i]).normalized();
      const double e_trial = cartesian_energy(trial, rho);
      if (e_trial <= energy - 1e-4 * step * gnorm2) {
        x.swap(trial);
        energy = e_trial;
        res.energy_trace.push_back(energy);
        step *= 1.5;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    ginf = tangential_gradient(x, rho, grad);
    gnorm2 = 0.0;
    for (const auto& g : grad) gnorm2 += g.squaredNorm();
    if (prev_energy - energy <= 1e-13 * std::max(1.0, std::abs(energy))) break;
  }

  // Phase 2: energy-blind polishing drives the gradient itself below tol;
  // position resolution still has headroom when the energy comparison does
  // not. Barzilai-Borwein steps with a revert safeguard.
  double alpha = 1e-3 * rho / std::max(ginf, 1e-300);
  std::vector<Vec3> prev_x = x, prev_g = grad;
  for (; it < opt.max_iterations && ginf >= opt.tol; ++it) {
    prev_x = x;
    prev_g = grad;
    const double prev_ginf = ginf;
    for (size_t i = 0; i < n; ++i)
      x[i] = rho * (x[i] - alpha * grad[i]).normalized();
    ginf = tangential_gradient(x, rho, grad);
    if (ginf > 3.0 * prev_ginf) {  // overshoot: revert and shrink
      x = prev_x;
      grad = prev_g;
      ginf = prev_ginf;
      alpha *= 0.25;
      continue;
    }
    double sy = 0.0, ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const Vec3 s = x[i] - prev_x[i];
      const Vec3 y = grad[i] - prev_g[i];
      sy += s.dot(y);
      ss += s.squaredNorm();
    }
    if (sy > 0.0 && ss > 0.0)
      alpha = std::clamp(ss / sy, 0.01 * alpha, 100.0 * alpha);
  }

  res.points = std::move(x);
  res.energy = cartesian_energy(res.points, rho);
  res.iterations = it;
  res.converged = ginf < opt.tol;
  return res;
}

inline std::vector<Vec3> random_sphere_points(int n, double rho, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vec3> x(n);
  for (int i = 0; i < n; ++i) {
    Vec3 v;
    do {
      v = Vec3(gauss(rng), gauss(rng), gauss(rng));
    } while (v.norm() < 1e-6);
    x[i] = rho * v.normalized();
  }
  return x;
}

}  // namespace detail

/// Near-uniform n-point distribution on the sphere of radius rho: multi-start
/// projected gradient descent on the Coulomb energy, lowest-energy start wins.
inline ThomsonResult solve_thomson(int n, double rho, const ThomsonOptions& opt = {}) {
  if (n < 2) throw Error("solve_thomson: need at least 2 points");
  if (!(rho > 0.0)) throw Error("solve_thomson: rho must be > 0");
  if (!(opt.tol > 0.0)) throw Error("solve_thomson: tol must be > 0");

  ThomsonResult best;
  bool have = false;
  const int starts = std::max(1, opt.multi_starts);
  for (int s = 0; s < starts; ++s) {
    auto x0 = detail::random_sphere_points(n, rho, mix_seed(opt.seed, s));
    ThomsonResult r = detail::descend(std::move(x0), rho, opt);
    if (!have || r.energy < best.energy) {
      best = std::move(r);
      have = true;
    }
  }
  if (!best.converged)
    throw Error("solve_thomson: no start converged within the iteration budget (n=" +
                std::to_string(n) + ")");
  return best;
}

}  // namespace stringnet
