#pragma once

#include "stringnet/assignment.hpp"
#include "stringnet/attacker.hpp"
#include "stringnet/dominance.hpp"
#include "stringnet/formation.hpp"
#include "stringnet/scenario.hpp"
#include "stringnet/tracking.hpp"
#include "stringnet/virtual_body.hpp"

#include <functional>
#include <map>
#include <ostream>

namespace stringnet {

enum class Phase {
  Gathering,
  Seeking,
  EnclosingHemisphere,
  EnclosingSphere,
  Herding,
  Done
};

inline const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Gathering: return "gathering";
    case Phase::Seeking: return "seeking";
    case Phase::EnclosingHemisphere: return "enclosing_hemisphere";
    case Phase::EnclosingSphere: return "enclosing_sphere";
    case Phase::Herding: return "herding";
    case Phase::Done: return "done";
  }
  return "?";
}

inline int phase_index(Phase p) { return static_cast<int>(p); }

struct PhaseStats {
  double start_time = 0.0;
  double end_time = -1.0;
  double max_error = 0.0;
  double steady_start = -1.0;      // first time all trackers are within b_d
  double max_steady_error = 0.0;   // max error from steady_start to phase end
};

struct SimulationMetrics {
  bool herding_success = false;
  std::string outcome;  // herded | breach | timeout | vacuous
  double end_time = 0.0;
  bool condition1_all_steps = true;
  bool containment_all_steps = true;  // from sphere closure to the end
  double min_barrier_clearance = std::numeric_limits<double>::infinity();
  double max_tracking_error = 0.0;
  std::map<std::string, PhaseStats> phases;
  int steps = 0;
};

inline Json metrics_to_json(const SimulationMetrics& m) {
  Json j;
  j["herding_success"] = m.herding_success;
  j["outcome"] = m.outcome;
  j["end_time"] = m.end_time;
  j["steps"] = m.steps;
  j["condition1_all_steps"] = m.condition1_all_steps;
  j["containment_all_steps"] = m.containment_all_steps;
  j["min_barrier_clearance"] =
      std::isfinite(m.min_barrier_clearance) ? Json(m.min_barrier_clearance) : Json();
  j["max_tracking_error"] = m.max_tracking_error;
  Json phases = Json::object();
  for (const auto& [name, st] : m.phases) {
    phases[name] = {{"start_time", st.start_time},
                    {"end_time", st.end_time},
                    {"duration", st.end_time >= 0 ? st.end_time - st.start_time : -1.0},
                    {"max_error", st.max_error},
                    {"steady_start", st.steady_start},
                    {"max_steady_error", st.max_steady_error}};
  }
  j["phases"] = phases;
  return j;
}

inline Vec3 gathering_center(const std::vector<Vec3>& defender_positions,
                             const Vec3& attacker_center, const Areas& areas,
                             const DominanceParams& params);

/// Fixed-step co-simulation of the defender state machine, the virtual rigid
/// body and the adversarial swarm.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    for (const auto& p : cfg_.defender_positions) defenders_.push_back({p, Vec3::Zero()});
    for (const auto& p : cfg_.attacker_positions) attackers_.push_back({p, Vec3::Zero()});
    if (!attackers_.empty()) prepare_defense();
  }

  SimulationMetrics run(std::ostream* trajectory = nullptr,
                        const std::function<void(const Simulation&)>& on_step = {}) {
    SimulationMetrics m;
    if (trajectory) {
      trajectory->precision(17);
      *trajectory << "t,agent_id,kind,x,y,z,vx,vy,vz,phase\n";
    }
    phase_stats(m).start_time = 0.0;

    const int max_steps = static_cast<int>(std::ceil(cfg_.time_cap / cfg_.dt));
    bool finished = false;
    for (int step = 0; step <= max_steps; ++step) {
      t_ = step * cfg_.dt;

      if (!attackers_.empty()) {
        transition(m);
        if (phase_ == Phase::Done) {
          m.outcome = "herded";
          m.herding_success = true;
          finished = true;
        } else if (breached()) {
          m.outcome = "breach";
          m.herding_success = false;
          finished = true;
        }
        refresh_goals();
      }

      observe(m);
      if (trajectory && (step % cfg_.log_every == 0 || finished || step == max_steps))
        log_rows(*trajectory);
      if (on_step) on_step(*this);
      m.steps = step;
      m.end_time = t_;
      if (finished) break;
      if (step == max_steps) {
        m.outcome = attackers_.empty() ? "vacuous" : "timeout";
        m.herding_success = attackers_.empty();
        break;
      }

      advance(m);
    }
    if (auto* st = current_stats(m)) st->end_time = t_;
    return m;
  }

  // Read access for callbacks and tests.
  double time() const { return t_; }
  Phase phase() const { return phase_; }
  const ScenarioConfig& config() const { return cfg_; }
  const std::vector<AgentState>& defenders() const { return defenders_; }
  const std::vector<AgentState>& attackers() const { return attackers_; }
  const VirtualBody& body() const { return body_; }
  const FormationFamily& formations() const { return family_; }
  const std::vector<int>& assignment() const { return assignment_; }
  const Vec3& gather_center() const { return gather_center_; }
  const std::vector<TargetRef>& goals() const { return goals_; }
  double rho_sn() const { return family_.rho_sn; }

  /// Active barrier graph: none before hookup, open until the sphere closes,
  /// closed afterwards.
  const StringNetGraph* active_net() const {
    if (!net_established_) return nullptr;
    return net_closed_ ? &family_.spherical.mesh : &family_.planar.mesh;
  }

  std::vector<Vec3> defender_position_list() const {
    std::vector<Vec3> out(defenders_.size());
    for (size_t i = 0; i < defenders_.size(); ++i) out[i] = defenders_[i].position;
    return out;
  }

 private:
  void prepare_defense() {
    const int n = static_cast<int>(defenders_.size());
    ThomsonOptions opt;
    opt.tol = cfg_.formation.solver_tol;
    opt.multi_starts = cfg_.formation.multi_starts;
    opt.seed = cfg_.seed;
    const double rho_sn = min_net_radius(cfg_.swarm.connectivity_radius,
                                         cfg_.formation.max_edge_length,
                                         cfg_.formation.tracking_error);
    SphereSolveCache cache(rho_sn, cfg_.formation.max_edge_length, opt);
    const SolvedSphere& sphere = cache.at(n);
    if (!(sphere.max_edge < cfg_.formation.max_edge_length))
      throw Error("Simulation: defender count violates the edge-length limit (max edge " +
                  std::to_string(sphere.max_edge) + ")");
    std::optional<double> k_pl = cfg_.formation.planar_scale;
    family_ = build_formation_family(sphere, cfg_.formation.max_edge_length, k_pl);
    if (!cfg_.formation.planar_scale) {
      // Auto mode keeps headroom so the strict edge bound survives tracking error.
      family_ = build_formation_family(
          sphere, cfg_.formation.max_edge_length,
          cfg_.formation.auto_scale_margin * family_.k_pl);
    }
    if (cfg_.areas.safe_radius <= family_.rho_sn)
      throw Error("Simulation: safe radius must exceed the net radius for drop-off");

    dom_params_.delta = cfg_.dominance.delta;
    dom_params_.gather_margin = cfg_.fsm.connect_time;
    dom_params_.planar_radius = family_.planar.radius;
    dom_params_.max_swarm_radius = cfg_.swarm.max_connectivity_radius;
    dom_params_.attacker_max_accel = cfg_.attacker_params.max_accel;
    dom_params_.defender_max_accel = cfg_.defender_params.max_accel;
    dom_params_.drag_coeff = cfg_.defender_params.drag_coeff;
    dom_params_.protected_radius = cfg_.areas.protected_radius;

    const Vec3 r_ac0 = swarm_center(attackers_);
    gather_center_ = gathering_center(defender_position_list(), r_ac0, cfg_.areas,
                                      dom_params_);
    gather_pose_.position = gather_center_;
    gather_pose_.orientation = orientation_towards(gather_center_, r_ac0);
    gather_goals_ = place(family_.planar.relative_positions, gather_pose_);
    assignment_ = assign_goals(defender_position_list(), gather_goals_);
    goals_.resize(defenders_.size());
  }

  bool all_within_bd(double* max_err = nullptr) const {
    const double bd = cfg_.formation.tracking_error;
    bool ok = true;
    double worst = 0.0;
    for (size_t j = 0; j < defenders_.size(); ++j) {
      const double e = (defenders_[j].position - goals_[j].position).norm();
      worst = std::max(worst, e);
      ok = ok && e < bd;
    }
    if (max_err) *max_err = worst;
    return ok;
  }

  PhaseStats& phase_stats(SimulationMetrics& m) const {
    return m.phases[phase_name(phase_)];
  }

  PhaseStats* current_stats(SimulationMetrics& m) const {
    auto it = m.phases.find(phase_name(phase_));
    return it == m.phases.end() ? nullptr : &it->second;
  }

  void enter_phase(Phase next, SimulationMetrics& m) {
    phase_stats(m).end_time = t_;
    phase_ = next;
    auto& st = phase_stats(m);
    st.start_time = t_;
    st.end_time = -1.0;
  }

  void transition(SimulationMetrics& m) {
    const Vec3 r_ac = swarm_center(attackers_);
    switch (phase_) {
      case Phase::Gathering: {
        refresh_goals();
        if (gather_done_time_ < 0.0 && all_within_bd()) gather_done_time_ = t_;
        if (gather_done_time_ >= 0.0 &&
            t_ - gather_done_time_ >= cfg_.fsm.connect_time) {
          net_established_ = true;
          body_.position = gather_pose_.position;
          body_.velocity = Vec3::Zero();
          body_.orientation = gather_pose_.orientation;
          body_.angular_velocity = Vec3::Zero();
          enter_phase(Phase::Seeking, m);
        }
        break;
      }
      case Phase::Seeking: {
        const Quat q_des = (r_ac - body_.position).norm() > 1e-9
                               ? orientation_towards(body_.position, r_ac)
                               : body_.orientation;
        const Quat qe = attitude_error(body_.orientation, q_des);
        if ((body_.position - r_ac).norm() < cfg_.fsm.eps_dist &&
            qe.vec().norm() < cfg_.fsm.eps_attitude) {
          enclosing_orientation_ = body_.orientation;
          enter_phase(Phase::EnclosingHemisphere, m);
        }
        break;
      }
      case Phase::EnclosingHemisphere: {
        refresh_goals();
        if (all_within_bd()) enter_phase(Phase::EnclosingSphere, m);
        break;
      }
      case Phase::EnclosingSphere: {
        refresh_goals();
        if (all_within_bd()) {
          net_closed_ = true;
          body_.position = r_ac;
          body_.velocity = swarm_mean_velocity(attackers_);
          body_.orientation = enclosing_orientation_;
          body_.angular_velocity = Vec3::Zero();
          enter_phase(Phase::Herding, m);
        }
        break;
      }
      case Phase::Herding: {
        bool all_safe = true;
        for (const auto& a : attackers_)
          all_safe = all_safe &&
                     (a.position - cfg_.areas.safe_center).norm() <= cfg_.areas.safe_radius;
        if (all_safe) enter_phase(Phase::Done, m);
        break;
      }
      case Phase::Done:
        break;
    }
  }

  /// Rebuilds the goal targets for the current phase and body state.
  void refresh_goals() {
    if (attackers_.empty()) return;
    const Vec3 r_ac = swarm_center(attackers_);
    const Vec3 v_ac = swarm_mean_velocity(attackers_);
    switch (phase_) {
      case Phase::Gathering:
        for (size_t j = 0; j < defenders_.size(); ++j)
          goals_[j] = TargetRef{gather_goals_[assignment_[j]], Vec3::Zero(), Vec3::Zero()};
        break;
      case Phase::Seeking: {
        pending_body_ = seeking_body_step(body_, r_ac, cfg_.fsm.seeking,
                                          cfg_.defender_params.drag_coeff, cfg_.dt);
        const auto targets = desired_positions(body_, family_.planar.relative_positions,
                                               pending_body_.command,
                                               cfg_.defender_params.drag_coeff);
        for (size_t j = 0; j < defenders_.size(); ++j) goals_[j] = targets[assignment_[j]];
        break;
      }
      case Phase::EnclosingHemisphere:
      case Phase::EnclosingSphere: {
        const auto& rel = (phase_ == Phase::EnclosingHemisphere)
                              ? family_.hemispherical.relative_positions
                              : family_.spherical.relative_positions;
        for (size_t j = 0; j < defenders_.size(); ++j) {
          const Vec3 arm = enclosing_orientation_ * rel[assignment_[j]];
          goals_[j] = TargetRef{r_ac + arm, v_ac, Vec3::Zero()};
        }
        break;
      }
      case Phase::Herding: {
        pending_body_ = herding_body_step(body_, cfg_.areas, cfg_.fsm.herding,
                                          family_.rho_sn,
                                          speed_bound(cfg_.attacker_params.max_accel,
                                                      cfg_.attacker_params.drag_coeff),
                                          cfg_.defender_params.drag_coeff, cfg_.dt);
        const auto targets = desired_positions(body_, family_.spherical.relative_positions,
                                               pending_body_.command,
                                               cfg_.defender_params.drag_coeff);
        for (size_t j = 0; j < defenders_.size(); ++j) goals_[j] = targets[assignment_[j]];
        break;
      }
      case Phase::Done:
        break;
    }
  }

  bool breached() const {
    for (const auto& a : attackers_)
      if ((a.position - cfg_.areas.protected_center).norm() <= cfg_.areas.protected_radius)
        return true;
    return false;
  }

  void observe(SimulationMetrics& m) {
    for (const auto& a : attackers_)
      if (!is_finite(a.position) || !is_finite(a.velocity))
        throw Error("Simulation: non-finite attacker state at t=" + std::to_string(t_));
    for (const auto& d : defenders_)
      if (!is_finite(d.position) || !is_finite(d.velocity))
        throw Error("Simulation: non-finite defender state at t=" + std::to_string(t_));

    if (attackers_.empty() || phase_ == Phase::Done) return;

    auto& st = phase_stats(m);
    double worst = 0.0;
    if (phase_ != Phase::Done && !goals_.empty() && net_or_goal_active()) {
      all_within_bd(&worst);
      st.max_error = std::max(st.max_error, worst);
      m.max_tracking_error = std::max(m.max_tracking_error, worst);
      if (st.steady_start < 0.0 && worst < cfg_.formation.tracking_error)
        st.steady_start = t_;
      if (st.steady_start >= 0.0)
        st.max_steady_error = std::max(st.max_steady_error, worst);
    }

    if (const StringNetGraph* net = active_net()) {
      const auto positions = defender_position_list();
      const auto rep = check_condition1(*net, positions);
      m.condition1_all_steps = m.condition1_all_steps && rep.pass;
      for (const auto& a : attackers_) {
        const double d = point_mesh_distance(a.position, *net, positions).first;
        m.min_barrier_clearance = std::min(m.min_barrier_clearance, d);
      }
      if (net_closed_) {
        for (const auto& a : attackers_)
          m.containment_all_steps =
              m.containment_all_steps && contains(a.position, *net, positions);
      }
    }
  }

  bool net_or_goal_active() const { return !attackers_.empty(); }

  void advance(SimulationMetrics&) {
    std::vector<Vec3> defender_u(defenders_.size(), Vec3::Zero());
    if (!attackers_.empty() && phase_ != Phase::Done) {
      for (size_t j = 0; j < defenders_.size(); ++j)
        defender_u[j] = track_goal(defenders_[j], goals_[j], cfg_.defender_params,
                                   cfg_.fsm.tracking);
    }

    std::vector<Vec3> attacker_u(attackers_.size(), Vec3::Zero());
    std::vector<Vec3> positions;
    std::vector<SensedNet> nets;
    if (const StringNetGraph* net = active_net()) {
      positions = defender_position_list();
      nets.push_back({net, &positions});
    }
    for (size_t i = 0; i < attackers_.size(); ++i)
      attacker_u[i] = saturate(
          attacker_control(static_cast<int>(i), attackers_, nets, cfg_.swarm,
                           cfg_.attacker_params, cfg_.areas),
          cfg_.attacker_params.max_accel);

    for (size_t j = 0; j < defenders_.size(); ++j)
      defenders_[j] = step_agent(defenders_[j], defender_u[j], cfg_.defender_params, cfg_.dt);
    for (size_t i = 0; i < attackers_.size(); ++i)
      attackers_[i] = step_agent(attackers_[i], attacker_u[i], cfg_.attacker_params, cfg_.dt);

    if (cfg_.barriers_impenetrable && !nets.empty()) {
      const auto new_positions = defender_position_list();
      for (auto& a : attackers_) {
        auto [d, q] = point_mesh_distance(a.position, *nets[0].net, new_positions);
        if (d < cfg_.attacker_params.radius && d > 1e-12) {
          const Vec3 n = (a.position - q) / d;
          a.position = q + cfg_.attacker_params.radius * n;
          const double vn = a.velocity.dot(n);
          if (vn < 0.0) a.velocity -= vn * n;
        }
      }
    }

    if (phase_ == Phase::Seeking || phase_ == Phase::Herding) body_ = pending_body_.body;
  }

  void log_rows(std::ostream& os) const {
    auto row = [&](int id, const char* kind, const Vec3& r, const Vec3& v) {
      os << t_ << ',' << id << ',' << kind << ',' << r.x() << ',' << r.y() << ','
         << r.z() << ',' << v.x() << ',' << v.y() << ',' << v.z() << ','
         << phase_name(phase_) << '\n';
    };
    for (size_t j = 0; j < defenders_.size(); ++j)
      row(static_cast<int>(j), "defender", defenders_[j].position, defenders_[j].velocity);
    for (size_t i = 0; i < attackers_.size(); ++i)
      row(static_cast<int>(i), "attacker", attackers_[i].position, attackers_[i].velocity);
    if (!attackers_.empty() && phase_ != Phase::Gathering)
      row(0, "virtual", body_.position, body_.velocity);
  }

  ScenarioConfig cfg_;
  std::vector<AgentState> defenders_;
  std::vector<AgentState> attackers_;
  FormationFamily family_;
  DominanceParams dom_params_;
  Vec3 gather_center_ = Vec3::Zero();
  Pose gather_pose_;
  std::vector<Vec3> gather_goals_;
  std::vector<int> assignment_;
  std::vector<TargetRef> goals_;
  VirtualBody body_;
  SeekingStep pending_body_;
  Quat enclosing_orientation_ = Quat::Identity();
  Phase phase_ = Phase::Gathering;
  bool net_established_ = false;
  bool net_closed_ = false;
  double gather_done_time_ = -1.0;
  double t_ = 0.0;
};

/// Gathering center on the segment from the protected center toward the
/// swarm: the minimizer of the required-attack-distance tradeoff, clamped
/// strictly between the protected boundary and the swarm boundary.
inline Vec3 gathering_center(const std::vector<Vec3>& defender_positions,
                             const Vec3& attacker_center, const Areas& areas,
                             const DominanceParams& params) {
  const Vec3 rel = attacker_center - areas.protected_center;
  const double dist = rel.norm();
  const double lo = areas.protected_radius;
  const double hi = dist - params.max_swarm_radius;
  if (!(hi > lo))
    throw Error("gathering_center: infeasible (attackers too close to the protected area)");
  const Vec3 dir = rel / dist;

  std::vector<Vec3> shifted;
  shifted.reserve(defender_positions.size());
  for (const auto& p : defender_positions) shifted.push_back(p - areas.protected_center);
  const auto min_attack = min_required_attack_distance(dir, shifted, params, hi);

  const double margin = 1e-6 * (hi - lo);
  const double r = std::clamp(min_attack.gather_radius, lo + margin, hi - margin);
  return areas.protected_center + r * dir;
}

}  // namespace stringnet
