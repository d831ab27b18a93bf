#include "stringnet/transforms.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace stringnet;

TEST_CASE("sphere-to-hemisphere halves the azimuth") {
  const SphericalPoint a = map_sphere_to_hemisphere({2.0, 0.8, 0.0});
  CHECK(a.azimuth == 0.0);
  CHECK(a.polar == 0.8);

  const SphericalPoint b = map_sphere_to_hemisphere({2.0, 0.8, M_PI});
  CHECK(b.azimuth == Catch::Approx(M_PI / 2));

  const SphericalPoint c = map_sphere_to_hemisphere({1.0, M_PI / 2, M_PI / 2});
  CHECK(c.azimuth == Catch::Approx(M_PI / 4));

  // The cut meridian maps consistently to the +pi side.
  const SphericalPoint d = map_sphere_to_hemisphere({1.0, 1.0, -M_PI});
  CHECK(d.azimuth == Catch::Approx(M_PI / 2));
}

TEST_CASE("primed rotation is the fixed y-axis quarter turn") {
  CHECK(rotate_to_primed(Vec3(1, 0, 0)).isApprox(Vec3(0, 0, -1)));
  CHECK(rotate_to_primed(Vec3(0, 0, 1)).isApprox(Vec3(1, 0, 0)));
  CHECK(rotate_to_primed(Vec3(0, 1, 0)).isApprox(Vec3(0, 1, 0)));
}

TEST_CASE("hemisphere-to-plane radial law") {
  CHECK(map_hemisphere_to_plane({35.0, 0.0, 1.1}, 1.2).radius == 0.0);
  CHECK(map_hemisphere_to_plane({35.0, M_PI / 2, 0.3}, 1.2).radius ==
        Catch::Approx(42.0));
  CHECK(map_hemisphere_to_plane({1.0, M_PI / 6, -0.4}, 1.0).radius ==
        Catch::Approx(0.5));
  CHECK_THROWS_AS(map_hemisphere_to_plane({1.0, 0.5, 0.0}, 0.0), Error);
}

TEST_CASE("max planar scale is the edge-limit ratio") {
  CHECK(max_planar_scale(30.0, 25.0) == Catch::Approx(1.2));
  CHECK_THROWS_AS(max_planar_scale(30.0, 30.0), Error);
  CHECK_THROWS_AS(max_planar_scale(30.0, 31.0), Error);
}

TEST_CASE("place applies the rigid transform") {
  std::vector<Vec3> rel{Vec3(1, 0, 0), Vec3(0, 2, 0), Vec3(0, 0, 3)};

  Pose identity;
  CHECK(place(rel, identity)[1].isApprox(Vec3(0, 2, 0)));

  Pose shift;
  shift.position = Vec3(5, -1, 2);
  const auto moved = place(rel, shift);
  for (size_t i = 0; i < rel.size(); ++i)
    for (size_t j = i + 1; j < rel.size(); ++j)
      CHECK((moved[i] - moved[j]).norm() ==
            Catch::Approx((rel[i] - rel[j]).norm()).epsilon(1e-12));

  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    Pose pose;
    pose.position = Vec3(g(rng), g(rng), g(rng));
    pose.orientation = Quat(g(rng), g(rng), g(rng), g(rng)).normalized();
    const auto out = place(rel, pose);
    for (size_t i = 0; i < rel.size(); ++i)
      for (size_t j = i + 1; j < rel.size(); ++j)
        CHECK((out[i] - out[j]).norm() ==
              Catch::Approx((rel[i] - rel[j]).norm()).epsilon(1e-12));
  }
}

TEST_CASE("place rejects non-unit quaternions") {
  Pose p;
  p.orientation = Quat(1.0, 0.2, 0.0, 0.0);  // unnormalized
  CHECK_THROWS_AS(place({Vec3(1, 0, 0)}, p), Error);
}

TEST_CASE("orientation_towards points the body z-axis") {
  CHECK(orientation_towards(Vec3::Zero(), Vec3(0, 0, 5))
            .isApprox(Quat::Identity(), 1e-12));

  const Quat down = orientation_towards(Vec3::Zero(), Vec3(0, 0, -3));
  CHECK((down * Vec3(0, 0, 1)).isApprox(Vec3(0, 0, -1), 1e-12));
  CHECK((down * Vec3(1, 0, 0)).isApprox(Vec3(1, 0, 0), 1e-12));  // flip about x

  const Quat side = orientation_towards(Vec3(1, 1, 1), Vec3(2, 1, 1));
  CHECK((side * Vec3(0, 0, 1)).isApprox(Vec3(1, 0, 0), 1e-12));

  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Vec3 to(g(rng), g(rng), g(rng));
    if (to.norm() < 1e-3) continue;
    const Quat q = orientation_towards(Vec3::Zero(), to);
    CHECK((q * Vec3(0, 0, 1)).isApprox(to.normalized(), 1e-9));
    CHECK(q.norm() == Catch::Approx(1.0).epsilon(1e-12));
  }

  CHECK_THROWS_AS(orientation_towards(Vec3(1, 2, 3), Vec3(1, 2, 3)), Error);
}
