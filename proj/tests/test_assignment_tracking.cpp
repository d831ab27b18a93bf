#include "stringnet/assignment.hpp"
#include "stringnet/tracking.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>

using namespace stringnet;

TEST_CASE("assignment is the identity when already on target") {
  std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(5, 1, 0), Vec3(-2, 3, 7)};
  const auto a = assign_goals(pts, pts);
  for (size_t i = 0; i < pts.size(); ++i) CHECK(a[i] == static_cast<int>(i));
}

TEST_CASE("assignment uncrosses two agents") {
  std::vector<Vec3> defenders{Vec3(0, 0, 0), Vec3(10, 0, 0)};
  std::vector<Vec3> goals{Vec3(9, 1, 0), Vec3(1, 1, 0)};
  const auto a = assign_goals(defenders, goals);
  CHECK(a[0] == 1);
  CHECK(a[1] == 0);
}

TEST_CASE("assignment matches brute force over all permutations") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Vec3> defenders, goals;
    for (int i = 0; i < 6; ++i) {
      defenders.emplace_back(u(rng), u(rng), u(rng));
      goals.emplace_back(u(rng), u(rng), u(rng));
    }
    const auto a = assign_goals(defenders, goals);
    double cost = 0.0;
    std::vector<bool> used(6, false);
    for (int i = 0; i < 6; ++i) {
      REQUIRE(!used[a[i]]);  // bijection
      used[a[i]] = true;
      cost += (defenders[i] - goals[a[i]]).squaredNorm();
    }
    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double c = 0.0;
      for (int i = 0; i < 6; ++i) c += (defenders[i] - goals[perm[i]]).squaredNorm();
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(cost == Catch::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("assignment rejects mismatched counts") {
  CHECK_THROWS_AS(assign_goals({Vec3::Zero()}, {Vec3::Zero(), Vec3::Ones()}), Error);
}

TEST_CASE("tracking feedforward compensates drag and target acceleration") {
  AgentParams p;
  p.max_accel = 10.0;
  p.drag_coeff = 0.01;
  TrackingGains g;

  TargetRef target;
  target.position = Vec3(3, 4, 5);
  target.velocity = Vec3(2, -1, 0.5);
  target.acceleration = Vec3(0.5, 0.2, -0.3);

  AgentState s;
  s.position = target.position;
  s.velocity = target.velocity;

  const Vec3 u = track_goal(s, target, p, g);
  const Vec3 expect = target.acceleration + p.drag_coeff * s.velocity.norm() * s.velocity;
  CHECK(u.isApprox(expect, 1e-12));
}

TEST_CASE("tracking rejects infeasible target acceleration") {
  AgentParams p;
  p.max_accel = 2.0;
  TargetRef target;
  target.acceleration = Vec3(3, 0, 0);
  CHECK_THROWS_AS(track_goal(AgentState{}, target, p, TrackingGains{}), Error);
}

TEST_CASE("static 100 m offset converges under the error bound and stays") {
  AgentParams p;
  p.max_accel = 10.0;
  p.drag_coeff = 0.01;
  TrackingGains g;
  const double b_d = 2.0;

  TargetRef target;
  target.position = Vec3(0, 0, 0);

  AgentState s;
  s.position = Vec3(100, 0, 0);

  const double dt = 0.01;
  double t_reach = -1.0;
  for (int k = 0; k < 6000; ++k) {
    s = step_agent(s, track_goal(s, target, p, g), p, dt);
    const double err = (s.position - target.position).norm();
    if (t_reach < 0.0 && err < b_d) t_reach = k * dt;
    if (t_reach >= 0.0) REQUIRE(err < b_d);
  }
  CHECK(t_reach > 0.0);
  CHECK(t_reach < 30.0);
}

TEST_CASE("tracking follows an accelerating target within the bound") {
  AgentParams p;
  p.max_accel = 10.0;
  p.drag_coeff = 0.01;
  TrackingGains g;
  const double b_d = 2.0;

  const double dt = 0.01;
  AgentState s;
  s.position = Vec3(5, -3, 2);

  double t_reach = -1.0;
  for (int k = 0; k < 8000; ++k) {
    const double t = k * dt;
    TargetRef target;
    target.position = Vec3(30 * std::sin(0.2 * t), 20 * std::cos(0.3 * t), t);
    target.velocity = Vec3(6 * std::cos(0.2 * t), -6 * std::sin(0.3 * t), 1.0);
    target.acceleration =
        Vec3(-1.2 * std::sin(0.2 * t), -1.8 * std::cos(0.3 * t), 0.0);
    s = step_agent(s, track_goal(s, target, p, g), p, dt);
    const double err = (s.position - target.position).norm();
    if (t_reach < 0.0 && err < 0.5 * b_d) t_reach = t;
    if (t_reach >= 0.0) REQUIRE(err < b_d);
  }
  CHECK(t_reach > 0.0);
}
