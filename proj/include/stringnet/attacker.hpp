#pragma once

#include "stringnet/core.hpp"
#include "stringnet/dynamics.hpp"
#include "stringnet/mesh.hpp"

namespace stringnet {

/// Potential-field gains of the adversarial swarm controller.
struct AttackerGains {
  double leader_attract = 0.5;     // spring toward the protected center
  double follower_attract = 0.5;   // spring toward the leader
  double cohesion = 0.08;          // spring toward the swarm center
  double agent_repulse = 40.0;     // inverse-distance potential scale
  double agent_repulse_range = 12.0;
  double barrier_repulse = 500.0;  // inverse-distance potential scale

  void validate() const {
    if (leader_attract < 0 || follower_attract < 0 || cohesion < 0 ||
        agent_repulse < 0 || agent_repulse_range < 0 || barrier_repulse < 0)
      throw Error("AttackerGains: gains must be >= 0");
  }
};

struct AttackerSwarmParams {
  double connectivity_radius = 0.0;      // nominal swarm radius
  double max_connectivity_radius = 0.0;  // worst-case swarm radius
  int leader_index = 0;
  double sensing_radius = 0.0;           // barrier sensing ball
  AttackerGains gains;

  void validate() const {
    if (!(connectivity_radius > 0.0) || !(max_connectivity_radius > 0.0))
      throw Error("AttackerSwarmParams: connectivity radii must be > 0");
    if (connectivity_radius > max_connectivity_radius)
      throw Error("AttackerSwarmParams: connectivity_radius > max_connectivity_radius");
    if (!(sensing_radius > 0.0))
      throw Error("AttackerSwarmParams: sensing_radius must be > 0");
    gains.validate();
  }
};

inline Vec3 swarm_center(const std::vector<AgentState>& states) {
  if (states.empty()) throw Error("swarm_center: no attackers");
  Vec3 c = Vec3::Zero();
  for (const auto& s : states) c += s.position;
  return c / static_cast<double>(states.size());
}

inline double swarm_radius(const std::vector<AgentState>& states) {
  const Vec3 c = swarm_center(states);
  double r = 0.0;
  for (const auto& s : states) r = std::max(r, (s.position - c).norm());
  return r;
}

inline Vec3 swarm_mean_velocity(const std::vector<AgentState>& states) {
  if (states.empty()) throw Error("swarm_mean_velocity: no attackers");
  Vec3 v = Vec3::Zero();
  for (const auto& s : states) v += s.velocity;
  return v / static_cast<double>(states.size());
}

/// A barrier net currently carried by the defenders.
struct SensedNet {
  const StringNetGraph* net = nullptr;
  const std::vector<Vec3>* positions = nullptr;
};

namespace detail {

/// Gradient of k/(d - d_min) pushing away from the closest point, active
/// below the cutoff. The magnitude is clamped near the singularity.
inline Vec3 inverse_distance_repulsion(const Vec3& p, const Vec3& closest, double d,
                                       double d_min, double cutoff, double k) {
  if (d >= cutoff || k == 0.0) return Vec3::Zero();
  if (d < 1e-12) return Vec3::Zero();  // direction undefined
  const double gap = std::max(d - d_min, 1e-3);
  return (k / (gap * gap)) * (p - closest) / d;
}

}  // namespace detail

/// Potential-field control of attacker i: leader pulls toward the protected
/// center, followers flock around the leader, every agent shies away from
/// sensed barrier faces. The caller saturates to the acceleration limit.
inline Vec3 attacker_control(int i, const std::vector<AgentState>& states,
                             const std::vector<SensedNet>& nets,
                             const AttackerSwarmParams& swarm,
                             const AgentParams& agent, const Areas& areas) {
  if (i < 0 || i >= static_cast<int>(states.size()))
    throw Error("attacker_control: bad index");
  const Vec3 r = states[i].position;
  Vec3 u = Vec3::Zero();

  if (i == swarm.leader_index) {
    u += saturate(-swarm.gains.leader_attract * (r - areas.protected_center),
                  agent.max_accel);
  } else {
    const Vec3 leader = states[swarm.leader_index].position;
    u += saturate(-swarm.gains.follower_attract * (r - leader), agent.max_accel);
    u += -swarm.gains.cohesion * (r - swarm_center(states));
  }

  const double d_min = 2.0 * agent.radius;
  for (size_t j = 0; j < states.size(); ++j) {
    if (static_cast<int>(j) == i) continue;
    const Vec3& other = states[j].position;
    const double d = (r - other).norm();
    u += detail::inverse_distance_repulsion(r, other, d, d_min,
                                            swarm.gains.agent_repulse_range,
                                            swarm.gains.agent_repulse);
  }

  // Barrier faces within the sensing ball, accumulated per face.
  for (const auto& sensed : nets) {
    if (sensed.net == nullptr || sensed.net->faces.empty()) continue;
    for (const auto& f : sensed.net->faces) {
      const Vec3 q = closest_point_on_triangle(r, (*sensed.positions)[f[0]],
                                               (*sensed.positions)[f[1]],
                                               (*sensed.positions)[f[2]]);
      const double d = (r - q).norm();
      u += detail::inverse_distance_repulsion(r, q, d, agent.radius,
                                              swarm.sensing_radius,
                                              swarm.gains.barrier_repulse);
    }
  }
  return u;
}

}  // namespace stringnet
