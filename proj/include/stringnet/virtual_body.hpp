#pragma once

#include "stringnet/core.hpp"
#include "stringnet/dynamics.hpp"
#include "stringnet/tracking.hpp"
#include "stringnet/transforms.hpp"

namespace stringnet {

/// Translating, rotating rigid frame carrying the desired formation.
struct VirtualBody {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Quat orientation = Quat::Identity();
  Vec3 angular_velocity = Vec3::Zero();  // body frame
};

/// Last applied virtual-body accelerations, needed by the desired-position
/// feedforward.
struct BodyCommand {
  Vec3 u_trans = Vec3::Zero();
  Vec3 u_rot = Vec3::Zero();
};

struct SeekingGains {
  double k1 = 0.05;            // translational spring toward the swarm center
  double attitude_p = 0.25;    // K (diagonal, uniform)
  double attitude_d = 1.0;     // D (diagonal, uniform)
  double u_trans_max = 1.0;
  double u_rot_max = 0.5;

  void validate() const {
    if (k1 < 0 || attitude_p < 0 || attitude_d < 0)
      throw Error("SeekingGains: gains must be >= 0");
    if (!(u_trans_max > 0) || !(u_rot_max > 0))
      throw Error("SeekingGains: saturation limits must be > 0");
  }
};

/// Error quaternion from desired to current, shortest-path sign.
inline Quat attitude_error(const Quat& current, const Quat& desired) {
  Quat e = desired.conjugate() * current;
  e.normalize();
  if (e.w() < 0.0) e.coeffs() = -e.coeffs();
  return e;
}

/// Quaternion increment for a body-frame rotation vector.
inline Quat quat_exp(const Vec3& half_angle) {
  const double a = half_angle.norm();
  if (a < 1e-12) return Quat::Identity();
  const Vec3 axis = half_angle / a;
  const double s = std::sin(a);
  return Quat(std::cos(a), s * axis.x(), s * axis.y(), s * axis.z());
}

/// Advances orientation by the body-frame angular velocity over dt.
inline Quat integrate_orientation(const Quat& q, const Vec3& omega_body, double dt) {
  Quat next = q * quat_exp(0.5 * dt * omega_body);
  next.normalize();
  return next;
}

struct SeekingStep {
  VirtualBody body;
  BodyCommand command;
};

/// One step of the seeking rigid body: saturated spring toward the swarm
/// center, attitude feedback turning the body z-axis onto it.
inline SeekingStep seeking_body_step(const VirtualBody& body, const Vec3& attacker_center,
                                     const SeekingGains& gains, double drag_coeff,
                                     double dt) {
  gains.validate();
  SeekingStep out;
  out.command.u_trans =
      saturate(-gains.k1 * (body.position - attacker_center), gains.u_trans_max);

  Quat q_des = body.orientation;
  if ((attacker_center - body.position).norm() > 1e-9)
    q_des = orientation_towards(body.position, attacker_center);
  const Quat qe = attitude_error(body.orientation, q_des);
  out.command.u_rot = saturate(-gains.attitude_d * body.angular_velocity -
                                   gains.attitude_p * qe.vec(),
                               gains.u_rot_max);

  AgentParams dyn;
  dyn.max_accel = gains.u_trans_max;
  dyn.drag_coeff = drag_coeff;
  AgentState st{body.position, body.velocity};
  st = step_agent(st, out.command.u_trans, dyn, dt);

  const Vec3 omega_next = body.angular_velocity + dt * out.command.u_rot;
  out.body.position = st.position;
  out.body.velocity = st.velocity;
  out.body.angular_velocity = omega_next;
  out.body.orientation = integrate_orientation(
      body.orientation, 0.5 * (body.angular_velocity + omega_next), dt);
  return out;
}

/// Desired position, velocity and acceleration of each formation point
/// carried by the body. Angular quantities are taken to the world frame
/// before forming the lever-arm terms.
inline std::vector<TargetRef> desired_positions(const VirtualBody& body,
                                                const std::vector<Vec3>& relative,
                                                const BodyCommand& cmd,
                                                double drag_coeff) {
  const Eigen::Matrix3d rot = body.orientation.toRotationMatrix();
  const Vec3 omega_w = rot * body.angular_velocity;
  const Vec3 omega_dot_w = rot * cmd.u_rot;
  const Vec3 a_lin =
      cmd.u_trans - drag_coeff * body.velocity.norm() * body.velocity;
  std::vector<TargetRef> out(relative.size());
  for (size_t l = 0; l < relative.size(); ++l) {
    const Vec3 arm = rot * relative[l];
    out[l].position = body.position + arm;
    out[l].velocity = body.velocity + omega_w.cross(arm);
    out[l].acceleration =
        a_lin + omega_dot_w.cross(arm) + omega_w.cross(omega_w.cross(arm));
  }
  return out;
}

struct HerdingGains {
  double speed_fraction = 0.8;  // kappa, fraction of the attacker speed bound
  double approach_gain = 0.2;   // slowdown spring near the drop point
  double velocity_gain = 1.0;
  double u_max = 1.0;
};

/// One step of the herding virtual agent: move toward the safe center with
/// the commanded speed capped at kappa * v_bar_a; stop once the formation
/// ball fits inside the safe area. Attitude is held.
inline SeekingStep herding_body_step(const VirtualBody& body, const Areas& areas,
                                     const HerdingGains& gains, double rho_sn,
                                     double attacker_speed_bound, double drag_coeff,
                                     double dt) {
  const double cap = gains.speed_fraction * attacker_speed_bound;
  const Vec3 to_safe = areas.safe_center - body.position;
  const double dist = to_safe.norm();

  Vec3 v_des = Vec3::Zero();
  if (dist + rho_sn > areas.safe_radius && dist > 1e-12)
    v_des = std::min(cap, gains.approach_gain * dist) * (to_safe / dist);

  SeekingStep out;
  out.command.u_trans =
      saturate(gains.velocity_gain * (v_des - body.velocity) +
                   drag_coeff * body.velocity.norm() * body.velocity,
               gains.u_max);

  AgentParams dyn;
  dyn.max_accel = gains.u_max;
  dyn.drag_coeff = drag_coeff;
  AgentState st{body.position, body.velocity};
  st = step_agent(st, out.command.u_trans, dyn, dt);
  out.body.position = st.position;
  out.body.velocity = st.velocity;
  if (out.body.velocity.norm() > cap)  // hard cap on the commanded speed
    out.body.velocity = cap * out.body.velocity.normalized();
  out.body.orientation = body.orientation;
  out.body.angular_velocity = Vec3::Zero();
  return out;
}

}  // namespace stringnet
