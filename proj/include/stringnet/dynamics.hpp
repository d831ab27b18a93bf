#pragma once

#include "stringnet/core.hpp"

namespace stringnet {

/// Actuation and geometry limits of one agent class.
struct AgentParams {
  double radius = 0.0;          // body radius [m]
  double max_accel = 1.0;       // acceleration limit [m/s^2]
  double drag_coeff = 0.01;     // quadratic drag coefficient [1/m]
  double sensing_radius = 0.0;  // sensing zone radius [m]

  void validate() const {
    if (!(max_accel > 0.0)) throw Error("AgentParams: max_accel must be > 0");
    if (!(drag_coeff > 0.0)) throw Error("AgentParams: drag_coeff must be > 0");
    if (radius < 0.0) throw Error("AgentParams: radius must be >= 0");
  }
};

struct AgentState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

/// Protected and safe balls.
struct Areas {
  Vec3 protected_center = Vec3::Zero();
  double protected_radius = 1.0;
  Vec3 safe_center = Vec3::Zero();
  double safe_radius = 1.0;

  void validate() const {
    if (!(protected_radius > 0.0)) throw Error("Areas: protected_radius must be > 0");
    if (!(safe_radius > 0.0)) throw Error("Areas: safe_radius must be > 0");
    if ((protected_center - safe_center).norm() <= protected_radius + safe_radius)
      throw Error("Areas: protected and safe balls must be disjoint");
  }
};

/// Clamps g to norm <= bound, preserving direction. Zero input maps to zero.
inline Vec3 saturate(const Vec3& g, double bound) {
  if (!(bound > 0.0)) throw Error("saturate: bound must be > 0");
  const double n = g.norm();
  if (n <= bound) return g;
  return (bound / n) * g;
}

/// Terminal speed sqrt(max_accel / drag_coeff) of the drag dynamics.
inline double speed_bound(double max_accel, double drag_coeff) {
  if (!(max_accel > 0.0) || !(drag_coeff > 0.0))
    throw Error("speed_bound: inputs must be > 0");
  return std::sqrt(max_accel / drag_coeff);
}

/// One fixed-step RK4 step of rdot = v, vdot = u - C_D*|v|*v with u held
/// constant over the step.
inline AgentState step_agent(const AgentState& state, const Vec3& u,
                             const AgentParams& params, double dt) {
  if (!(dt > 0.0)) throw Error("step_agent: dt must be > 0");
  if (!is_finite(state.position) || !is_finite(state.velocity) || !is_finite(u))
    throw Error("step_agent: non-finite input");

  const double cd = params.drag_coeff;
  auto accel = [&](const Vec3& v) -> Vec3 { return u - cd * v.norm() * v; };

  const Vec3 k1r = state.velocity;
  const Vec3 k1v = accel(state.velocity);
  const Vec3 k2r = state.velocity + 0.5 * dt * k1v;
  const Vec3 k2v = accel(state.velocity + 0.5 * dt * k1v);
  const Vec3 k3r = state.velocity + 0.5 * dt * k2v;
  const Vec3 k3v = accel(state.velocity + 0.5 * dt * k2v);
  const Vec3 k4r = state.velocity + dt * k3v;
  const Vec3 k4v = accel(state.velocity + dt * k3v);

  AgentState next;
  next.position = state.position + (dt / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
  next.velocity = state.velocity + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  return next;
}

}  // namespace stringnet
