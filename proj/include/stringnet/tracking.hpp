#pragma once

#include "stringnet/core.hpp"
#include "stringnet/dynamics.hpp"

namespace stringnet {

/// Desired position, velocity and acceleration of one tracked point.
struct TargetRef {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
};

struct TrackingGains {
  double kp = 3.0;
  double kv = 4.0;
  double alpha = 0.6;  // fractional feedback exponent in (0, 1)
};

/// Saturated computed-acceleration tracking law: feedforward of the target
/// acceleration and own drag, plus continuous fractional-power feedback.
/// Holds the closed-loop error inside the b_d ball once the saturation
/// margin covers the unknown target-acceleration residual.
inline Vec3 track_goal(const AgentState& state, const TargetRef& target,
                       const AgentParams& params, const TrackingGains& gains) {
  if (target.acceleration.norm() >= params.max_accel)
    throw Error("track_goal: infeasible margin (target acceleration >= max_accel)");
  const Vec3 e = state.position - target.position;
  const Vec3 edot = state.velocity - target.velocity;
  const Vec3 u = target.acceleration +
                 params.drag_coeff * state.velocity.norm() * state.velocity -
                 gains.kp * sig_pow(e, gains.alpha) -
                 gains.kv * sig_pow(edot, gains.alpha);
  return saturate(u, params.max_accel);
}

}  // namespace stringnet
