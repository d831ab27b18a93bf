#include "stringnet/formation.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace stringnet;

TEST_CASE("min_net_radius takes the binding branch") {
  CHECK(min_net_radius(30.0, 30.0, 5.0) == Catch::Approx(35.0));
  CHECK(min_net_radius(30.0, 60.0, 1.0) == Catch::Approx(std::sqrt(900.0 + 1200.0)));
  CHECK(min_net_radius(30.0, 1e-6, 5.0) == Catch::Approx(35.0));
  CHECK_THROWS_AS(min_net_radius(0.0, 1.0, 1.0), Error);
}

TEST_CASE("edge-ratio fit curve") {
  CHECK(avg_edge_ratio_fit(4) == Catch::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-12));
  CHECK(avg_edge_ratio_fit(12) == Catch::Approx(1.05146).margin(1e-5));
  CHECK(avg_edge_ratio_fit(1000000) < 1e-2);
  CHECK_THROWS_AS(avg_edge_ratio_fit(3), Error);

  double prev = avg_edge_ratio_fit(4);
  for (int n = 5; n <= 200; ++n) {
    const double cur = avg_edge_ratio_fit(n);
    REQUIRE(cur < prev);
    prev = cur;
  }
}

TEST_CASE("min_count_for_ratio inverts the fit") {
  CHECK(min_count_for_ratio(avg_edge_ratio_fit(4)) == 4);
  CHECK(min_count_for_ratio(2.0) == 4);
  CHECK(min_count_for_ratio(avg_edge_ratio_fit(12)) == 12);

  // Brute-force scan oracle at ratio 0.5.
  const double ratio = 0.5;
  int expected = -1;
  for (int n = 4; n <= 200; ++n)
    if (avg_edge_ratio_fit(n) <= ratio) { expected = n; break; }
  REQUIRE(expected > 0);
  CHECK(min_count_for_ratio(ratio) == expected);

  CHECK_THROWS_AS(min_count_for_ratio(0.0), Error);
}

TEST_CASE("solve_uniform_sphere returns a consistent closed formation") {
  const Formation f = solve_uniform_sphere(4, 1.0, 42);
  CHECK(f.kind == FormationKind::Spherical);
  CHECK(f.count() == 4);
  CHECK(static_cast<int>(f.mesh.faces.size()) == 4);
  CHECK(max_edge_length(f) == Catch::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-3));
  CHECK(avg_edge_length(f) == Catch::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-3));
  for (const auto& p : f.relative_positions)
    CHECK(p.norm() == Catch::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(solve_uniform_sphere(3, 1.0, 0), Error);
}

TEST_CASE("edge lengths scale with the formation") {
  const Formation a = solve_uniform_sphere(9, 1.0, 7);
  const Formation b = solve_uniform_sphere(9, 3.5, 7);
  CHECK(max_edge_length(b) == Catch::Approx(3.5 * max_edge_length(a)).epsilon(1e-6));
  CHECK(avg_edge_length(b) == Catch::Approx(3.5 * avg_edge_length(a)).epsilon(1e-6));
}

TEST_CASE("a loose edge limit accepts the tetrahedron immediately") {
  // ratio R/rho_sn = 100/57.73 > sqrt(8/3)
  ThomsonOptions opt;
  opt.seed = 42;
  const double rho_sn = min_net_radius(1.0, 100.0, 1.0);
  SphereSolveCache cache(rho_sn, 100.0, opt);
  const auto res = min_defender_count(1.0, 100.0, 1.0, cache);
  CHECK(res.count == 4);
  CHECK(res.iterations == 1);
}

TEST_CASE("guess start and minimum start agree, guess iterates less") {
  ThomsonOptions opt;
  opt.seed = 42;
  const double rho_ac = 30.0, r_bar = 30.0, b_d = 5.0;
  const double rho_sn = min_net_radius(rho_ac, r_bar, b_d);
  SphereSolveCache cache(rho_sn, r_bar, opt);
  const auto guess = min_defender_count(rho_ac, r_bar, b_d, cache);
  const auto brute = min_defender_count(rho_ac, r_bar, b_d, cache, /*from_minimum=*/true);
  CHECK(guess.count == brute.count);
  CHECK(guess.iterations <= brute.iterations);
  CHECK(guess.sphere.max_edge < r_bar);
  // Returned formation satisfies the implied face-area bound.
  const auto rep = check_condition1(guess.sphere.formation.mesh,
                                    guess.sphere.formation.relative_positions);
  CHECK(rep.pass);
  CHECK(rep.max_face_area <= rep.face_area_bound);
}

TEST_CASE("twenty defenders satisfy the edge limit at the demo scale") {
  ThomsonOptions opt;
  opt.seed = 42;
  const double rho_ac = 30.0, r_bar = 42.0, b_d = 2.0;
  const double rho_sn = min_net_radius(rho_ac, r_bar, b_d);
  SphereSolveCache cache(rho_sn, r_bar, opt);
  CHECK(cache.at(20).max_edge < r_bar);
  CHECK(min_defender_count(rho_ac, r_bar, b_d, cache).count <= 20);
}

TEST_CASE("budget exhaustion is an error") {
  ThomsonOptions opt;
  opt.seed = 1;
  SphereSolveCache cache(min_net_radius(30, 30, 5), 30.0, opt);
  CHECK_THROWS_AS(min_defender_count(30, 30, 5, cache, false, 6), Error);
}

TEST_CASE("ratio table matches the regular solids and the iterative search") {
  ThomsonOptions opt;
  opt.seed = 42;
  SphereSolveCache unit(1.0, 0.0, opt);
  const auto rows = precomputed_ratio_table(4, 30, unit);
  CHECK(rows.front().n == 4);
  CHECK(rows.front().r_rel == Catch::Approx(1.633).margin(1e-3));
  CHECK(rows[2].n == 6);
  CHECK(rows[2].r_rel == Catch::Approx(1.414).margin(1e-3));

  std::ostringstream os;
  write_ratio_table_csv(os, rows);
  CHECK(os.str().substr(0, 14) == "n,r_rel,r_avg\n");

  // Table lookup agrees with the iterative search on random edge limits.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.75, 1.55);
  const double rho_ac = 30.0, b_d = 5.0;
  for (int k = 0; k < 10; ++k) {
    const double rho_sn_probe = min_net_radius(rho_ac, 30.0, b_d);
    const double r_bar = u(rng) * rho_sn_probe;
    const double rho_sn = min_net_radius(rho_ac, r_bar, b_d);
    SphereSolveCache cache(rho_sn, r_bar, opt);
    const auto algo = min_defender_count(rho_ac, r_bar, b_d, cache);
    CHECK(table_lookup_count(rows, r_bar / rho_sn) == algo.count);
  }
}

TEST_CASE("formation family obeys the mapping edge laws") {
  ThomsonOptions opt;
  opt.seed = 42;
  const double r_bar = 30.0;
  const double rho_sn = min_net_radius(30.0, r_bar, 5.0);
  SphereSolveCache cache(rho_sn, r_bar, opt);
  const auto res = min_defender_count(30.0, r_bar, 5.0, cache);
  const auto fam = build_formation_family(res.sphere, r_bar);

  CHECK(fam.k_pl > 1.0);  // Lemma-1 slack above the unit scale

  // Open-net edges never grow under the hemisphere mapping.
  const auto& open = fam.hemispherical.mesh;
  for (const auto& e : open.edges) {
    const double sp = (fam.spherical.relative_positions[e[0]] -
                       fam.spherical.relative_positions[e[1]])
                          .norm();
    const double hs = (fam.hemispherical.relative_positions[e[0]] -
                       fam.hemispherical.relative_positions[e[1]])
                          .norm();
    CHECK(hs <= sp + 1e-12);
  }

  // Planar edges are bounded by k_pl times the hemisphirical ones and stay
  // under the barrier limit at the maximal scale.
  for (const auto& e : open.edges) {
    const double hs = (fam.hemispherical.relative_positions[e[0]] -
                       fam.hemispherical.relative_positions[e[1]])
                          .norm();
    const double pl = (fam.planar.relative_positions[e[0]] -
                       fam.planar.relative_positions[e[1]])
                          .norm();
    CHECK(pl <= fam.k_pl * hs + 1e-9);
    CHECK(pl < r_bar);
  }

  // Radial consistency.
  for (const auto& p : fam.hemispherical.relative_positions)
    CHECK(p.norm() == Catch::Approx(rho_sn).epsilon(1e-9));
  double max_planar = 0.0;
  for (const auto& p : fam.planar.relative_positions) {
    CHECK(p.z() == 0.0);
    max_planar = std::max(max_planar, p.norm());
  }
  CHECK(max_planar <= fam.k_pl * rho_sn + 1e-9);

  CHECK_NOTHROW(validate_topology(fam.hemispherical.mesh));
  CHECK_NOTHROW(validate_topology(fam.spherical.mesh));
}

TEST_CASE("fit inequality holds on solved formations") {
  ThomsonOptions opt;
  opt.seed = 42;
  SphereSolveCache unit(1.0, 0.0, opt);
  for (int n : {8, 12, 16, 20, 30, 40})
    CHECK(avg_edge_ratio_fit(n) < unit.at(n).max_edge);
}
