#pragma once

#include "stringnet/core.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <utility>

namespace stringnet {

/// Triangle-mesh barrier graph over defender indices. Closed nets are
/// sphere-like (every edge borders two faces); open nets have a single
/// boundary loop.
struct StringNetGraph {
  int vertex_count = 0;
  std::vector<std::array<int, 2>> edges;  // undirected, a < b
  std::vector<std::array<int, 3>> faces;  // outward-oriented triples
  bool closed = false;
  double max_edge_constraint = 0.0;       // admissible barrier length

  bool empty() const { return faces.empty(); }
};

namespace detail {

inline std::array<int, 2> undirected(int a, int b) {
  return a < b ? std::array<int, 2>{a, b} : std::array<int, 2>{b, a};
}

inline std::vector<std::array<int, 2>> edges_of_faces(
    const std::vector<std::array<int, 3>>& faces) {
  std::set<std::array<int, 2>> set;
  for (const auto& f : faces) {
    set.insert(undirected(f[0], f[1]));
    set.insert(undirected(f[1], f[2]));
    set.insert(undirected(f[2], f[0]));
  }
  return {set.begin(), set.end()};
}

}  // namespace detail

/// Convex-hull triangulation of >= 4 points in general position. Faces come
/// out outward-oriented; every input point must be a hull vertex.
inline StringNetGraph triangulate(const std::vector<Vec3>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 4) throw Error("triangulate: need at least 4 points");

  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = 1e-9 * std::max(scale, 1.0);

  // Initial simplex: spread-out extreme points.
  int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
  for (int i = 1; i < n; ++i)
    if (points[i].x() < points[i0].x()) i0 = i;
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double d = (points[i] - points[i0]).norm();
    if (d > best) { best = d; i1 = i; }
  }
  if (best <= eps) throw Error("triangulate: degenerate configuration (duplicate points)");
  const Vec3 dir = (points[i1] - points[i0]).normalized();
  best = -1.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 d = points[i] - points[i0];
    const double h = (d - d.dot(dir) * dir).norm();
    if (h > best) { best = h; i2 = i; }
  }
  if (best <= eps) throw Error("triangulate: degenerate configuration (collinear points)");
  const Vec3 nrm = (points[i1] - points[i0]).cross(points[i2] - points[i0]).normalized();
  best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double h = std::abs(nrm.dot(points[i] - points[i0]));
    if (h > best) { best = h; i3 = i; }
  }
  if (best <= eps) throw Error("triangulate: degenerate configuration (coplanar points)");

  const Vec3 interior =
      0.25 * (points[i0] + points[i1] + points[i2] + points[i3]);

  std::vector<std::array<int, 3>> faces;
  auto add_face = [&](int a, int b, int c) {
    Vec3 fn = (points[b] - points[a]).cross(points[c] - points[a]);
    if (fn.dot(points[a] - interior) < 0.0) std::swap(b, c);
    faces.push_back({a, b, c});
  };
  add_face(i0, i1, i2);
  add_face(i0, i1, i3);
  add_face(i0, i2, i3);
  add_face(i1, i2, i3);

  auto face_sees = [&](const std::array<int, 3>& f, const Vec3& p) {
    const Vec3 fn = (points[f[1]] - points[f[0]]).cross(points[f[2]] - points[f[0]]);
    return fn.dot(p - points[f[0]]) > eps * fn.norm();
  };

  std::vector<bool> used(n, false);
  used[i0] = used[i1] = used[i2] = used[i3] = true;

  for (int p = 0; p < n; ++p) {
    if (used[p]) continue;
    used[p] = true;

    std::vector<bool> visible(faces.size(), false);
    bool any = false;
    for (size_t f = 0; f < faces.size(); ++f) {
      visible[f] = face_sees(faces[f], points[p]);
      any = any || visible[f];
    }
    if (!any)
      throw Error("triangulate: point inside hull (degenerate configuration)");

    // Horizon: directed edges of visible faces whose twin face survives.
    std::map<std::pair<int, int>, int> twin_visible;
    for (size_t f = 0; f < faces.size(); ++f) {
      const auto& t = faces[f];
      for (int k = 0; k < 3; ++k) {
        twin_visible[{t[k], t[(k + 1) % 3]}] = visible[f] ? 1 : 0;
      }
    }
    std::vector<std::pair<int, int>> horizon;
    for (size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      const auto& t = faces[f];
      for (int k = 0; k < 3; ++k) {
        const int a = t[k], b = t[(k + 1) % 3];
        auto it = twin_visible.find({b, a});
        if (it == twin_visible.end() || it->second == 0) horizon.push_back({a, b});
      }
    }

    std::vector<std::array<int, 3>> kept;
    for (size_t f = 0; f < faces.size(); ++f)
      if (!visible[f]) kept.push_back(faces[f]);
    faces.swap(kept);
    for (const auto& [a, b] : horizon) add_face(a, b, p);
  }

  std::vector<int> degree(n, 0);
  for (const auto& f : faces) { ++degree[f[0]]; ++degree[f[1]]; ++degree[f[2]]; }
  for (int i = 0; i < n; ++i)
    if (degree[i] == 0)
      throw Error("triangulate: point not on hull (degenerate configuration)");

  StringNetGraph g;
  g.vertex_count = n;
  g.faces = std::move(faces);
  g.edges = detail::edges_of_faces(g.faces);
  g.closed = true;
  return g;
}

/// Sub-mesh spanned by the kept faces; the result is marked open.
inline StringNetGraph open_subgraph(const StringNetGraph& g,
                                    const std::vector<bool>& keep_face) {
  StringNetGraph out;
  out.vertex_count = g.vertex_count;
  out.closed = false;
  out.max_edge_constraint = g.max_edge_constraint;
  for (size_t f = 0; f < g.faces.size(); ++f)
    if (keep_face[f]) out.faces.push_back(g.faces[f]);
  out.edges = detail::edges_of_faces(out.faces);
  return out;
}

/// Structural validation per the closed/open net definitions.
inline void validate_topology(const StringNetGraph& g) {
  std::map<std::array<int, 2>, int> edge_faces;
  std::map<std::pair<int, int>, int> directed;
  for (const auto& f : g.faces) {
    for (int k = 0; k < 3; ++k) {
      const int a = f[k], b = f[(k + 1) % 3];
      ++edge_faces[detail::undirected(a, b)];
      if (++directed[{a, b}] > 1)
        throw Error("StringNetGraph: inconsistent face orientation");
    }
  }
  std::set<std::array<int, 2>> edge_set(g.edges.begin(), g.edges.end());
  for (const auto& [e, cnt] : edge_faces) {
    if (!edge_set.count(e)) throw Error("StringNetGraph: face edge missing from edge set");
    if (g.closed && cnt != 2) throw Error("StringNetGraph: closed net edge not on 2 faces");
    if (!g.closed && cnt != 1 && cnt != 2)
      throw Error("StringNetGraph: edge on more than 2 faces");
  }
  if (edge_set.size() != edge_faces.size())
    throw Error("StringNetGraph: edge without a face");

  if (g.faces.empty()) return;

  // Face connectivity over shared edges.
  std::map<std::array<int, 2>, std::vector<int>> by_edge;
  for (size_t f = 0; f < g.faces.size(); ++f) {
    const auto& t = g.faces[f];
    for (int k = 0; k < 3; ++k)
      by_edge[detail::undirected(t[k], t[(k + 1) % 3])].push_back(static_cast<int>(f));
  }
  std::vector<bool> seen(g.faces.size(), false);
  std::vector<int> stack{0};
  seen[0] = true;
  size_t reached = 1;
  while (!stack.empty()) {
    const int f = stack.back();
    stack.pop_back();
    const auto& t = g.faces[f];
    for (int k = 0; k < 3; ++k) {
      for (int nb : by_edge[detail::undirected(t[k], t[(k + 1) % 3])]) {
        if (!seen[nb]) { seen[nb] = true; ++reached; stack.push_back(nb); }
      }
    }
  }
  if (reached != g.faces.size())
    throw Error("StringNetGraph: face union not a single component");

  const long v = g.vertex_count, e = static_cast<long>(g.edges.size()),
             f = static_cast<long>(g.faces.size());
  if (g.closed) {
    if (v - e + f != 2) throw Error("StringNetGraph: closed net fails V-E+F=2");
  } else {
    // Boundary edges must form one cycle.
    std::map<int, std::vector<int>> adj;
    int boundary_edges = 0;
    for (const auto& [edge, cnt] : edge_faces) {
      if (cnt != 1) continue;
      ++boundary_edges;
      adj[edge[0]].push_back(edge[1]);
      adj[edge[1]].push_back(edge[0]);
    }
    if (boundary_edges == 0) throw Error("StringNetGraph: open net has no boundary");
    for (const auto& [vtx, nbs] : adj)
      if (nbs.size() != 2) throw Error("StringNetGraph: boundary is not a simple cycle");
    int cur = adj.begin()->first, prev = -1, steps = 0;
    const int start = cur;
    do {
      const auto& nbs = adj[cur];
      const int nxt = (nbs[0] != prev) ? nbs[0] : nbs[1];
      prev = cur;
      cur = nxt;
      ++steps;
    } while (cur != start && steps <= boundary_edges);
    if (steps != boundary_edges)
      throw Error("StringNetGraph: boundary edges form more than one cycle");
  }
}

struct Condition1Report {
  bool pass = true;
  double max_edge = 0.0;
  double max_face_area = 0.0;
  double face_area_bound = 0.0;
  std::vector<std::pair<std::array<int, 2>, double>> violations;
};

/// Edge-length audit against the barrier limit, plus the implied face-area
/// bound sqrt(3)/4 * R^2.
inline Condition1Report check_condition1(const StringNetGraph& net,
                                         const std::vector<Vec3>& positions) {
  if (static_cast<int>(positions.size()) < net.vertex_count)
    throw Error("check_condition1: positions do not cover all vertices");
  Condition1Report rep;
  const double r = net.max_edge_constraint;
  rep.face_area_bound = std::sqrt(3.0) / 4.0 * r * r;
  for (const auto& e : net.edges) {
    const double len = (positions[e[0]] - positions[e[1]]).norm();
    rep.max_edge = std::max(rep.max_edge, len);
    if (!(len < r)) {
      rep.pass = false;
      rep.violations.push_back({e, len});
    }
  }
  for (const auto& f : net.faces) {
    const double area = 0.5 * (positions[f[1]] - positions[f[0]])
                                  .cross(positions[f[2]] - positions[f[0]])
                                  .norm();
    rep.max_face_area = std::max(rep.max_face_area, area);
  }
  return rep;
}

/// Closest point on triangle abc to p (Voronoi-region walk).
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                      const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);

  const double denom = va + vb + vc;
  const double v = vb / denom, w = vc / denom;
  return a + v * ab + w * ac;
}

/// Minimum distance from p to the union of net faces, with the realizing point.
inline std::pair<double, Vec3> point_mesh_distance(const Vec3& p,
                                                   const StringNetGraph& net,
                                                   const std::vector<Vec3>& positions) {
  if (net.faces.empty()) throw Error("point_mesh_distance: net has no faces");
  double best = std::numeric_limits<double>::infinity();
  Vec3 best_pt = Vec3::Zero();
  for (const auto& f : net.faces) {
    const Vec3 q = closest_point_on_triangle(p, positions[f[0]], positions[f[1]],
                                             positions[f[2]]);
    const double d = (p - q).norm();
    if (d < best) { best = d; best_pt = q; }
  }
  return {best, best_pt};
}

namespace detail {

/// Watertight-enough ray/triangle test; returns 1 on a clean hit, 0 on a
/// clean miss, -1 when the hit is too close to call (near edge or origin).
inline int ray_hits_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                             const Vec3& b, const Vec3& c, double eps) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 pv = dir.cross(e2);
  const double det = e1.dot(pv);
  if (std::abs(det) < eps) return -1;  // ray parallel to face plane
  const double inv = 1.0 / det;
  const Vec3 tv = origin - a;
  const double u = tv.dot(pv) * inv;
  const Vec3 qv = tv.cross(e1);
  const double v = dir.dot(qv) * inv;
  const double t = e2.dot(qv) * inv;
  const double bary_eps = 1e-9;
  if (u < -bary_eps || v < -bary_eps || u + v > 1.0 + bary_eps) return 0;
  if (t < -bary_eps) return 0;
  if (u < bary_eps || v < bary_eps || u + v > 1.0 - bary_eps || t < bary_eps)
    return -1;  // grazing: ask for another ray
  return 1;
}

}  // namespace detail

/// Ray-casting parity test against a closed net. Points on the surface count
/// as contained.
inline bool contains(const Vec3& p, const StringNetGraph& net,
                     const std::vector<Vec3>& positions) {
  if (!net.closed) throw Error("contains: net is not closed");
  double scale = 1.0;
  for (const auto& f : net.faces)
    for (int k = 0; k < 3; ++k)
      scale = std::max(scale, positions[f[k]].cwiseAbs().maxCoeff());
  if (point_mesh_distance(p, net, positions).first <= 1e-9 * scale) return true;

  Vec3 dir(0.577215, 0.301103, 0.759002);
  for (int attempt = 0; attempt < 64; ++attempt) {
    dir.normalize();
    int crossings = 0;
    bool clean = true;
    for (const auto& f : net.faces) {
      const int hit = detail::ray_hits_triangle(p, dir, positions[f[0]],
                                                positions[f[1]], positions[f[2]],
                                                1e-14 * scale * scale);
      if (hit < 0) { clean = false; break; }
      crossings += hit;
    }
    if (clean) return (crossings % 2) == 1;
    // Grazing ray: rotate deterministically and retry.
    dir = Vec3(dir.y() + 0.113 * (attempt + 1), dir.z() - 0.071, dir.x() + 0.029);
  }
  throw Error("contains: could not find a non-degenerate ray");
}

/// OFF-format mesh export.
inline void write_off(std::ostream& os, const StringNetGraph& net,
                      const std::vector<Vec3>& positions) {
  os << "OFF\n"
     << net.vertex_count << ' ' << net.faces.size() << ' ' << net.edges.size()
     << '\n';
  os.precision(17);
  for (int i = 0; i < net.vertex_count; ++i) {
    const Vec3& p = positions[i];
    os << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  }
  for (const auto& f : net.faces)
    os << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

}  // namespace stringnet
