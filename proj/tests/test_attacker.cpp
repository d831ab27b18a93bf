#include "stringnet/attacker.hpp"
#include "stringnet/mesh.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace stringnet;

namespace {

AttackerSwarmParams demo_swarm() {
  AttackerSwarmParams s;
  s.connectivity_radius = 30.0;
  s.max_connectivity_radius = 35.0;
  s.leader_index = 0;
  s.sensing_radius = 60.0;
  return s;
}

AgentParams demo_agent() {
  AgentParams p;
  p.radius = 1.0;
  p.max_accel = 5.0;
  p.drag_coeff = 0.01;
  p.sensing_radius = 60.0;
  return p;
}

Areas demo_areas() {
  Areas a;
  a.protected_center = Vec3::Zero();
  a.protected_radius = 50.0;
  a.safe_center = Vec3(600, 500, 300);
  a.safe_radius = 60.0;
  return a;
}

/// Two triangles forming a large square wall in the x=0 plane.
struct Wall {
  StringNetGraph net;
  std::vector<Vec3> positions;
  Wall() {
    positions = {Vec3(0, -200, -200), Vec3(0, 200, -200), Vec3(0, 200, 200),
                 Vec3(0, -200, 200)};
    net.vertex_count = 4;
    net.faces = {{0, 1, 2}, {0, 2, 3}};
    net.edges = {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {0, 3}};
    net.closed = false;
  }
};

}  // namespace

TEST_CASE("swarm center and radius") {
  std::vector<AgentState> one{{Vec3(3, 2, 1), Vec3::Zero()}};
  CHECK(swarm_center(one).isApprox(Vec3(3, 2, 1)));
  CHECK(swarm_radius(one) == 0.0);

  std::vector<AgentState> two{{Vec3(1, 0, 0), Vec3::Zero()}, {Vec3(-1, 0, 0), Vec3::Zero()}};
  CHECK(swarm_center(two).isApprox(Vec3::Zero()));
  CHECK(swarm_radius(two) == Catch::Approx(1.0));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  std::vector<AgentState> six;
  for (int i = 0; i < 6; ++i) six.push_back({Vec3(u(rng), u(rng), u(rng)), Vec3::Zero()});
  Vec3 mean = Vec3::Zero();
  for (const auto& s : six) mean += s.position;
  mean /= 6.0;
  double rad = 0.0;
  for (const auto& s : six) rad = std::max(rad, (s.position - mean).norm());
  CHECK(swarm_center(six).isApprox(mean, 1e-12));
  CHECK(swarm_radius(six) == Catch::Approx(rad));

  CHECK_THROWS_AS(swarm_center({}), Error);
}

TEST_CASE("lone distant leader pulls straight toward the protected center") {
  const auto swarm = demo_swarm();
  const auto agent = demo_agent();
  const auto areas = demo_areas();
  std::vector<AgentState> states{{Vec3(1000, 0, 0), Vec3::Zero()}};
  const Vec3 u = saturate(attacker_control(0, states, {}, swarm, agent, areas),
                          agent.max_accel);
  CHECK(u.isApprox(agent.max_accel * Vec3(-1, 0, 0), 1e-12));
}

TEST_CASE("follower at the swarm center feels only the leader spring") {
  auto swarm = demo_swarm();
  swarm.gains.agent_repulse_range = 3.0;  // others out of range
  const auto agent = demo_agent();
  const auto areas = demo_areas();
  // Center of {6, 2, -2} on the x-axis is exactly at x=2 where F1 sits.
  std::vector<AgentState> states{{Vec3(6, 0, 0), Vec3::Zero()},
                                 {Vec3(2, 0, 0), Vec3::Zero()},
                                 {Vec3(-2, 0, 0), Vec3::Zero()}};
  const Vec3 u = attacker_control(1, states, {}, swarm, agent, areas);
  const Vec3 expect =
      saturate(-swarm.gains.follower_attract * (states[1].position - states[0].position),
               agent.max_accel);
  CHECK(u.isApprox(expect, 1e-12));
}

TEST_CASE("head-on approach reverses before the body-radius clearance") {
  const auto swarm = demo_swarm();
  const auto agent = demo_agent();
  Areas areas = demo_areas();
  areas.protected_center = Vec3(-1000, 0, 0);  // pull is straight into the wall

  Wall wall;
  std::vector<SensedNet> nets{{&wall.net, &wall.positions}};

  AgentState s{Vec3(100, 0, 0), Vec3::Zero()};
  double min_clearance = std::numeric_limits<double>::infinity();
  bool reversed = false;
  for (int k = 0; k < 20000; ++k) {
    std::vector<AgentState> states{s};
    const Vec3 u =
        saturate(attacker_control(0, states, nets, swarm, agent, areas), agent.max_accel);
    s = step_agent(s, u, agent, 0.01);
    min_clearance = std::min(min_clearance,
                             point_mesh_distance(s.position, wall.net, wall.positions).first);
    if (s.velocity.x() > 0.1) { reversed = true; break; }
  }
  CHECK(reversed);
  CHECK(min_clearance > agent.radius);
}

TEST_CASE("barrier-free flock keeps its connectivity radius") {
  const auto swarm = demo_swarm();
  const auto agent = demo_agent();
  const auto areas = demo_areas();

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::vector<AgentState> states;
  for (int i = 0; i < 6; ++i)
    states.push_back({Vec3(900 + u(rng), 120 + u(rng), 260 + u(rng)), Vec3::Zero()});

  double max_radius_late = 0.0;
  const double dt = 0.01;
  for (int k = 0; k < 6000; ++k) {
    std::vector<Vec3> controls(states.size());
    for (size_t i = 0; i < states.size(); ++i)
      controls[i] = saturate(
          attacker_control(static_cast<int>(i), states, {}, swarm, agent, areas),
          agent.max_accel);
    for (size_t i = 0; i < states.size(); ++i)
      states[i] = step_agent(states[i], controls[i], agent, dt);
    if (k > 4000) max_radius_late = std::max(max_radius_late, swarm_radius(states));
  }
  CHECK(max_radius_late <= swarm.connectivity_radius);
}

TEST_CASE("swarm parameter validation") {
  auto s = demo_swarm();
  s.connectivity_radius = 50.0;  // above the max
  s.max_connectivity_radius = 40.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = demo_swarm();
  s.gains.cohesion = -1.0;
  CHECK_THROWS_AS(s.validate(), Error);
}
