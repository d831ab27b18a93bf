#pragma once

#include "stringnet/core.hpp"
#include "stringnet/mesh.hpp"
#include "stringnet/spherical.hpp"
#include "stringnet/thomson.hpp"
#include "stringnet/transforms.hpp"

#include <map>
#include <optional>
#include <ostream>

namespace stringnet {

enum class FormationKind { Spherical, Hemispherical, Planar };

/// A set of relative defender positions plus the net graph connecting them.
/// radius is the sphere radius for the spherical/hemispherical kinds and the
/// outer planar radius for the planar kind.
struct Formation {
  FormationKind kind = FormationKind::Spherical;
  std::vector<Vec3> relative_positions;
  StringNetGraph mesh;
  double radius = 0.0;

  int count() const { return static_cast<int>(relative_positions.size()); }
};

inline double max_edge_length(const Formation& f) {
  double m = 0.0;
  for (const auto& e : f.mesh.edges)
    m = std::max(m, (f.relative_positions[e[0]] - f.relative_positions[e[1]]).norm());
  return m;
}

inline double avg_edge_length(const Formation& f) {
  if (f.mesh.edges.empty()) throw Error("avg_edge_length: empty mesh");
  double s = 0.0;
  for (const auto& e : f.mesh.edges)
    s += (f.relative_positions[e[0]] - f.relative_positions[e[1]]).norm();
  return s / static_cast<double>(f.mesh.edges.size());
}

/// Smallest sphere radius whose net still encloses a ball of radius rho_ac
/// when every edge is stretched to the barrier limit:
/// max{ sqrt(rho_ac^2 + R^2/3), rho_ac + b_d }.
inline double min_net_radius(double rho_ac, double r_bar_sb, double b_d) {
  if (!(rho_ac > 0.0) || !(r_bar_sb > 0.0) || !(b_d > 0.0))
    throw Error("min_net_radius: inputs must be > 0");
  return std::max(std::sqrt(rho_ac * rho_ac + r_bar_sb * r_bar_sb / 3.0),
                  rho_ac + b_d);
}

/// Fitted average relative edge length of the n-point uniform sphere
/// distribution. Strictly decreasing for n >= 4, with limit 0.
inline double avg_edge_ratio_fit(int n) {
  if (n < 4) throw Error("avg_edge_ratio_fit: n must be >= 4");
  const double ang = M_PI * n / (3.0 * n - 6.0);
  const double c = std::cos(ang);
  return std::sqrt(2.0 * (1.0 - 2.0 * c) / (1.0 - c));
}

/// Smallest n >= 4 with avg_edge_ratio_fit(n) <= ratio; 4 when the ratio
/// already admits a tetrahedron.
inline int min_count_for_ratio(double ratio) {
  if (!(ratio > 0.0)) throw Error("min_count_for_ratio: ratio must be > 0");
  if (avg_edge_ratio_fit(4) <= ratio) return 4;
  int lo = 4, hi = 8;
  while (avg_edge_ratio_fit(hi) > ratio) {
    lo = hi;
    hi *= 2;
    if (hi > (1 << 28)) throw Error("min_count_for_ratio: ratio too small");
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (avg_edge_ratio_fit(mid) > ratio ? lo : hi) = mid;
  }
  return hi;
}

/// Solved n-point sphere with its hull net and edge statistics.
struct SolvedSphere {
  Formation formation;  // spherical, closed net
  std::vector<SphericalPoint> coords;
  double max_edge = 0.0;
  double avg_edge = 0.0;
  int solver_iterations = 0;
};

/// Solves and memoizes uniform sphere distributions per point count. The
/// per-count seed is derived from the base seed, so results do not depend on
/// query order.
class SphereSolveCache {
 public:
  SphereSolveCache(double rho, double r_bar_sb, ThomsonOptions opt)
      : rho_(rho), r_bar_sb_(r_bar_sb), opt_(opt) {}

  const SolvedSphere& at(int n) {
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;

    ThomsonOptions o = opt_;
    o.seed = mix_seed(opt_.seed, static_cast<std::uint64_t>(n));
    ThomsonResult r = solve_thomson(n, rho_, o);

    SolvedSphere s;
    s.formation.kind = FormationKind::Spherical;
    s.formation.relative_positions = r.points;
    s.formation.radius = rho_;
    s.formation.mesh = triangulate(r.points);
    s.formation.mesh.max_edge_constraint = r_bar_sb_;
    s.coords.reserve(r.points.size());
    for (const auto& p : r.points) s.coords.push_back(to_spherical(p));
    s.max_edge = max_edge_length(s.formation);
    s.avg_edge = avg_edge_length(s.formation);
    s.solver_iterations = r.iterations;
    return cache_.emplace(n, std::move(s)).first->second;
  }

  double rho() const { return rho_; }

 private:
  double rho_;
  double r_bar_sb_;
  ThomsonOptions opt_;
  std::map<int, SolvedSphere> cache_;
};

/// Uniform spherical formation of n defenders at radius rho.
inline Formation solve_uniform_sphere(int n, double rho, std::uint64_t seed,
                                      double tol = 1e-8) {
  if (n < 4) throw Error("solve_uniform_sphere: n must be >= 4");
  ThomsonOptions opt;
  opt.seed = seed;
  opt.tol = tol;
  SphereSolveCache cache(rho, 0.0, opt);
  return cache.at(n).formation;
}

struct MinDefenderResult {
  int count = 0;
  int iterations = 0;     // counts of solved candidate counts
  double rho_sn = 0.0;
  SolvedSphere sphere;
};

/// Smallest defender count whose uniform spherical formation at the minimal
/// net radius keeps every edge under the barrier limit. Starts from the
/// fit-based guess unless from_minimum is set.
inline MinDefenderResult min_defender_count(double rho_ac, double r_bar_sb, double b_d,
                                            SphereSolveCache& cache,
                                            bool from_minimum = false,
                                            int cap = 500) {
  const double rho_sn = min_net_radius(rho_ac, r_bar_sb, b_d);
  const double ratio = r_bar_sb / rho_sn;
  MinDefenderResult res;
  res.rho_sn = rho_sn;
  int n = from_minimum ? 4 : min_count_for_ratio(ratio);
  for (; n <= cap; ++n) {
    ++res.iterations;
    const SolvedSphere& s = cache.at(n);
    if (s.max_edge < r_bar_sb) {
      res.count = n;
      res.sphere = s;
      return res;
    }
  }
  throw Error("min_defender_count: budget exhausted (cap " + std::to_string(cap) + ")");
}

struct RatioRow {
  int n = 0;
  double r_rel = 0.0;
  double r_avg = 0.0;
};

/// Pre-computed relative edge-length table; a linear search over it replaces
/// the per-query iteration.
inline std::vector<RatioRow> precomputed_ratio_table(int n_min, int n_max,
                                                     SphereSolveCache& cache) {
  if (n_min < 4) throw Error("precomputed_ratio_table: n_min must be >= 4");
  if (n_max < n_min) throw Error("precomputed_ratio_table: empty range");
  std::vector<RatioRow> rows;
  rows.reserve(n_max - n_min + 1);
  const double rho = cache.rho();
  for (int n = n_min; n <= n_max; ++n) {
    const SolvedSphere& s = cache.at(n);
    rows.push_back({n, s.max_edge / rho, s.avg_edge / rho});
  }
  return rows;
}

inline void write_ratio_table_csv(std::ostream& os, const std::vector<RatioRow>& rows) {
  os << "n,r_rel,r_avg\n";
  os.precision(17);
  for (const auto& r : rows) os << r.n << ',' << r.r_rel << ',' << r.r_avg << '\n';
}

/// Smallest tabulated n whose relative max edge fits under ratio.
inline int table_lookup_count(const std::vector<RatioRow>& rows, double ratio) {
  for (const auto& r : rows)
    if (r.r_rel < ratio) return r.n;
  throw Error("table_lookup_count: no tabulated count satisfies the ratio");
}

/// The spherical formation with its two open-net descendants. The
/// hemispherical formation is stored in the primed frame (dome axis along
/// -z), coaxial with the planar disk it flattens into.
struct FormationFamily {
  Formation spherical;      // closed net
  Formation hemispherical;  // open net, radius rho_sn
  Formation planar;         // open net, radius k_pl * rho_sn
  double rho_sn = 0.0;
  double k_pl = 0.0;
  double r_hs_max = 0.0;
};

namespace detail {

/// Faces torn by the azimuth cut at +-pi: any edge whose endpoints' azimuths
/// wrap around the cut. Pole vertices never tear an edge.
inline std::vector<bool> faces_kept_after_cut(const StringNetGraph& closed,
                                              const std::vector<SphericalPoint>& coords) {
  auto is_pole = [&](int i) { return std::sin(coords[i].polar) < 1e-9; };
  auto edge_crosses = [&](int i, int j) {
    if (is_pole(i) || is_pole(j)) return false;
    return std::abs(coords[i].azimuth - coords[j].azimuth) > M_PI;
  };
  std::vector<bool> keep(closed.faces.size(), true);
  for (size_t f = 0; f < closed.faces.size(); ++f) {
    const auto& t = closed.faces[f];
    if (edge_crosses(t[0], t[1]) || edge_crosses(t[1], t[2]) || edge_crosses(t[2], t[0]))
      keep[f] = false;
  }
  return keep;
}

}  // namespace detail

/// Builds the hemispherical and planar formations from a solved sphere.
/// k_pl defaults to the maximal admissible scale.
inline FormationFamily build_formation_family(const SolvedSphere& sphere,
                                              double r_bar_sb,
                                              std::optional<double> k_pl = std::nullopt) {
  FormationFamily fam;
  fam.spherical = sphere.formation;
  fam.spherical.mesh.max_edge_constraint = r_bar_sb;
  fam.rho_sn = sphere.formation.radius;

  const auto keep = detail::faces_kept_after_cut(sphere.formation.mesh, sphere.coords);
  StringNetGraph open = open_subgraph(sphere.formation.mesh, keep);
  open.max_edge_constraint = r_bar_sb;
  validate_topology(open);

  fam.hemispherical.kind = FormationKind::Hemispherical;
  fam.hemispherical.mesh = open;
  fam.hemispherical.radius = fam.rho_sn;
  std::vector<SphericalPoint> primed_coords;
  primed_coords.reserve(sphere.coords.size());
  for (const auto& c : sphere.coords) {
    const Vec3 hs = rotate_to_primed(to_cartesian(map_sphere_to_hemisphere(c)));
    fam.hemispherical.relative_positions.push_back(hs);
    primed_coords.push_back(to_spherical(hs));
  }

  fam.r_hs_max = max_edge_length(fam.hemispherical);
  fam.k_pl = k_pl ? *k_pl : max_planar_scale(r_bar_sb, fam.r_hs_max);
  if (!(fam.k_pl > 0.0)) throw Error("build_formation_family: k_pl must be > 0");

  fam.planar.kind = FormationKind::Planar;
  fam.planar.mesh = open;
  fam.planar.radius = fam.k_pl * fam.rho_sn;
  for (const auto& c : primed_coords)
    fam.planar.relative_positions.push_back(
        planar_embed(map_hemisphere_to_plane(c, fam.k_pl)));

  return fam;
}

}  // namespace stringnet
