#pragma once

#include "stringnet/attacker.hpp"
#include "stringnet/core.hpp"
#include "stringnet/dynamics.hpp"
#include "stringnet/tracking.hpp"
#include "stringnet/virtual_body.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <set>

namespace stringnet {

using Json = nlohmann::json;

namespace detail {

/// Strict object reader: every key must be consumed, unknown keys fail fast.
class JsonCursor {
 public:
  JsonCursor(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw Error(path_ + ": expected an object");
  }

  const Json& raw(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) throw Error(path_ + ": missing field '" + key + "'");
    seen_.insert(key);
    return *it;
  }

  bool has(const char* key) const { return j_.contains(key); }

  double number(const char* key) {
    const Json& v = raw(key);
    if (!v.is_number()) throw Error(path_ + "." + key + ": expected a number");
    return v.get<double>();
  }

  double number_or(const char* key, double def) {
    return has(key) ? number(key) : def;
  }

  int integer(const char* key) {
    const Json& v = raw(key);
    if (!v.is_number_integer()) throw Error(path_ + "." + key + ": expected an integer");
    return v.get<int>();
  }

  int integer_or(const char* key, int def) { return has(key) ? integer(key) : def; }

  std::uint64_t uinteger_or(const char* key, std::uint64_t def) {
    if (!has(key)) return def;
    const Json& v = raw(key);
    if (!v.is_number_unsigned() && !v.is_number_integer())
      throw Error(path_ + "." + key + ": expected an integer");
    return v.get<std::uint64_t>();
  }

  bool boolean_or(const char* key, bool def) {
    if (!has(key)) return def;
    const Json& v = raw(key);
    if (!v.is_boolean()) throw Error(path_ + "." + key + ": expected a boolean");
    return v.get<bool>();
  }

  Vec3 vec3(const char* key) {
    const Json& v = raw(key);
    if (!v.is_array() || v.size() != 3)
      throw Error(path_ + "." + key + ": expected an array of 3 numbers");
    return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  }

  std::vector<Vec3> vec3_list(const char* key) {
    const Json& v = raw(key);
    if (!v.is_array()) throw Error(path_ + "." + key + ": expected an array");
    std::vector<Vec3> out;
    out.reserve(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
      const Json& e = v[i];
      if (!e.is_array() || e.size() != 3)
        throw Error(path_ + "." + key + "[" + std::to_string(i) +
                    "]: expected an array of 3 numbers");
      out.emplace_back(e[0].get<double>(), e[1].get<double>(), e[2].get<double>());
    }
    return out;
  }

  JsonCursor object(const char* key) {
    return JsonCursor(raw(key), path_ + "." + key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw Error(path_ + ": unknown field '" + it.key() + "'");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

inline Json to_json(const std::vector<Vec3>& vs) {
  Json a = Json::array();
  for (const auto& v : vs) a.push_back(to_json(v));
  return a;
}

}  // namespace detail

struct FormationConfig {
  double max_edge_length = 30.0;  // barrier length limit
  double tracking_error = 2.0;    // b_d
  std::optional<double> planar_scale;  // empty = auto
  double auto_scale_margin = 0.98;     // strictness headroom in auto mode
  double solver_tol = 1e-8;
  int multi_starts = 4;
};

struct FsmConfig {
  double eps_dist = 5.0;        // seeking position threshold
  double eps_attitude = 0.05;   // seeking attitude-error threshold
  double connect_time = 5.0;    // net hookup time after gathering
  double herd_speed_fraction = 0.8;
  TrackingGains tracking;
  SeekingGains seeking;
  HerdingGains herding;
};

struct DominanceConfig {
  double delta = 20.0;
  int grid_theta = 16;
  int grid_phi = 16;
};

struct ScenarioConfig {
  int version = 1;
  std::uint64_t seed = 0;
  double dt = 0.01;
  double time_cap = 600.0;
  int log_every = 1;
  bool barriers_impenetrable = false;

  Areas areas;
  AgentParams defender_params;
  std::vector<Vec3> defender_positions;
  AgentParams attacker_params;
  AttackerSwarmParams swarm;
  std::vector<Vec3> attacker_positions;
  FormationConfig formation;
  FsmConfig fsm;
  DominanceConfig dominance;

  void validate() const {
    if (version != 1) throw Error("ScenarioConfig: unsupported version");
    if (!(dt > 0.0)) throw Error("ScenarioConfig: dt must be > 0");
    if (!(time_cap > 0.0)) throw Error("ScenarioConfig: time_cap must be > 0");
    if (log_every < 1) throw Error("ScenarioConfig: log_every must be >= 1");
    areas.validate();
    defender_params.validate();
    attacker_params.validate();
    if (defender_positions.size() < 4)
      throw Error("ScenarioConfig: need at least 4 defenders");
    if (!attacker_positions.empty()) swarm.validate();
    if (defender_params.radius > attacker_params.radius)
      throw Error("ScenarioConfig: defender radius must be <= attacker radius");
    if (!(formation.max_edge_length > 0.0) || !(formation.tracking_error > 0.0))
      throw Error("ScenarioConfig: formation lengths must be > 0");
    if (swarm.leader_index < 0 ||
        (!attacker_positions.empty() &&
         swarm.leader_index >= static_cast<int>(attacker_positions.size())))
      throw Error("ScenarioConfig: leader_index out of range");
    for (const auto& p : defender_positions)
      if ((p - areas.protected_center).norm() <= areas.protected_radius)
        throw Error("ScenarioConfig: defender starts inside the protected area");
    for (const auto& p : attacker_positions)
      if ((p - areas.protected_center).norm() <= areas.protected_radius)
        throw Error("ScenarioConfig: attacker starts inside the protected area");
  }
};

inline AgentParams parse_agent_params(detail::JsonCursor c) {
  AgentParams p;
  p.radius = c.number("radius");
  p.max_accel = c.number("max_accel");
  p.drag_coeff = c.number("drag_coeff");
  p.sensing_radius = c.number_or("sensing_radius", 0.0);
  c.finish();
  return p;
}

inline ScenarioConfig parse_scenario(const Json& j, const std::string& origin = "config") {
  detail::JsonCursor c(j, origin);
  ScenarioConfig cfg;
  cfg.version = c.integer("version");
  cfg.seed = c.uinteger_or("seed", 0);
  cfg.dt = c.number_or("dt", 0.01);
  cfg.time_cap = c.number_or("time_cap", 600.0);
  cfg.log_every = c.integer_or("log_every", 1);
  cfg.barriers_impenetrable = c.boolean_or("barriers_impenetrable", false);

  {
    auto a = c.object("areas");
    cfg.areas.protected_center = a.vec3("protected_center");
    cfg.areas.protected_radius = a.number("protected_radius");
    cfg.areas.safe_center = a.vec3("safe_center");
    cfg.areas.safe_radius = a.number("safe_radius");
    a.finish();
  }
  {
    auto d = c.object("defenders");
    cfg.defender_params = parse_agent_params(d.object("params"));
    cfg.defender_positions = d.vec3_list("initial_positions");
    d.finish();
  }
  {
    auto a = c.object("attackers");
    cfg.attacker_params = parse_agent_params(a.object("params"));
    cfg.attacker_positions = a.vec3_list("initial_positions");
    auto s = a.object("swarm");
    cfg.swarm.connectivity_radius = s.number("connectivity_radius");
    cfg.swarm.max_connectivity_radius = s.number("max_connectivity_radius");
    cfg.swarm.leader_index = s.integer_or("leader_index", 0);
    cfg.swarm.sensing_radius = cfg.attacker_params.sensing_radius;
    if (s.has("gains")) {
      auto g = s.object("gains");
      cfg.swarm.gains.leader_attract = g.number_or("leader_attract", 0.5);
      cfg.swarm.gains.follower_attract = g.number_or("follower_attract", 0.5);
      cfg.swarm.gains.cohesion = g.number_or("cohesion", 0.08);
      cfg.swarm.gains.agent_repulse = g.number_or("agent_repulse", 40.0);
      cfg.swarm.gains.agent_repulse_range = g.number_or("agent_repulse_range", 12.0);
      cfg.swarm.gains.barrier_repulse = g.number_or("barrier_repulse", 500.0);
      g.finish();
    }
    s.finish();
    a.finish();
  }
  {
    auto f = c.object("formation");
    cfg.formation.max_edge_length = f.number("max_edge_length");
    cfg.formation.tracking_error = f.number("tracking_error");
    if (f.has("planar_scale")) {
      const Json& v = f.raw("planar_scale");
      if (v.is_string()) {
        if (v.get<std::string>() != "auto")
          throw Error(origin + ".formation.planar_scale: expected a number or \"auto\"");
      } else if (v.is_number()) {
        cfg.formation.planar_scale = v.get<double>();
      } else {
        throw Error(origin + ".formation.planar_scale: expected a number or \"auto\"");
      }
    }
    cfg.formation.auto_scale_margin = f.number_or("auto_scale_margin", 0.98);
    cfg.formation.solver_tol = f.number_or("solver_tol", 1e-8);
    cfg.formation.multi_starts = f.integer_or("multi_starts", 4);
    f.finish();
  }
  if (c.has("fsm")) {
    auto f = c.object("fsm");
    cfg.fsm.eps_dist = f.number_or("eps_dist", 5.0);
    cfg.fsm.eps_attitude = f.number_or("eps_attitude", 0.05);
    cfg.fsm.connect_time = f.number_or("connect_time", 5.0);
    cfg.fsm.herd_speed_fraction = f.number_or("herd_speed_fraction", 0.8);
    if (f.has("tracking")) {
      auto t = f.object("tracking");
      cfg.fsm.tracking.kp = t.number_or("kp", cfg.fsm.tracking.kp);
      cfg.fsm.tracking.kv = t.number_or("kv", cfg.fsm.tracking.kv);
      cfg.fsm.tracking.alpha = t.number_or("alpha", cfg.fsm.tracking.alpha);
      t.finish();
    }
    if (f.has("seeking")) {
      auto s = f.object("seeking");
      cfg.fsm.seeking.k1 = s.number_or("k1", cfg.fsm.seeking.k1);
      cfg.fsm.seeking.attitude_p = s.number_or("attitude_p", cfg.fsm.seeking.attitude_p);
      cfg.fsm.seeking.attitude_d = s.number_or("attitude_d", cfg.fsm.seeking.attitude_d);
      cfg.fsm.seeking.u_trans_max = s.number_or("u_trans_max", cfg.fsm.seeking.u_trans_max);
      cfg.fsm.seeking.u_rot_max = s.number_or("u_rot_max", cfg.fsm.seeking.u_rot_max);
      s.finish();
    }
    if (f.has("herding")) {
      auto h = f.object("herding");
      cfg.fsm.herding.approach_gain = h.number_or("approach_gain", cfg.fsm.herding.approach_gain);
      cfg.fsm.herding.velocity_gain = h.number_or("velocity_gain", cfg.fsm.herding.velocity_gain);
      cfg.fsm.herding.u_max = h.number_or("u_max", cfg.fsm.herding.u_max);
      h.finish();
    }
    f.finish();
  }
  if (c.has("dominance")) {
    auto d = c.object("dominance");
    cfg.dominance.delta = d.number_or("delta", 20.0);
    cfg.dominance.grid_theta = d.integer_or("grid_theta", 16);
    cfg.dominance.grid_phi = d.integer_or("grid_phi", 16);
    d.finish();
  }
  c.finish();

  cfg.fsm.herding.speed_fraction = cfg.fsm.herd_speed_fraction;
  cfg.validate();
  return cfg;
}

inline ScenarioConfig parse_scenario_text(const std::string& text,
                                          const std::string& origin = "config") {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(origin + ": JSON parse failure: " + e.what());
  }
  return parse_scenario(j, origin);
}

inline Json scenario_to_json(const ScenarioConfig& cfg) {
  Json j;
  j["version"] = cfg.version;
  j["seed"] = cfg.seed;
  j["dt"] = cfg.dt;
  j["time_cap"] = cfg.time_cap;
  j["log_every"] = cfg.log_every;
  j["barriers_impenetrable"] = cfg.barriers_impenetrable;
  j["areas"] = {{"protected_center", detail::to_json(cfg.areas.protected_center)},
                {"protected_radius", cfg.areas.protected_radius},
                {"safe_center", detail::to_json(cfg.areas.safe_center)},
                {"safe_radius", cfg.areas.safe_radius}};
  auto agent = [](const AgentParams& p) {
    return Json{{"radius", p.radius},
                {"max_accel", p.max_accel},
                {"drag_coeff", p.drag_coeff},
                {"sensing_radius", p.sensing_radius}};
  };
  j["defenders"] = {{"params", agent(cfg.defender_params)},
                    {"initial_positions", detail::to_json(cfg.defender_positions)}};
  j["attackers"] = {
      {"params", agent(cfg.attacker_params)},
      {"initial_positions", detail::to_json(cfg.attacker_positions)},
      {"swarm",
       {{"connectivity_radius", cfg.swarm.connectivity_radius},
        {"max_connectivity_radius", cfg.swarm.max_connectivity_radius},
        {"leader_index", cfg.swarm.leader_index},
        {"gains",
         {{"leader_attract", cfg.swarm.gains.leader_attract},
          {"follower_attract", cfg.swarm.gains.follower_attract},
          {"cohesion", cfg.swarm.gains.cohesion},
          {"agent_repulse", cfg.swarm.gains.agent_repulse},
          {"agent_repulse_range", cfg.swarm.gains.agent_repulse_range},
          {"barrier_repulse", cfg.swarm.gains.barrier_repulse}}}}}};
  j["formation"] = {{"max_edge_length", cfg.formation.max_edge_length},
                    {"tracking_error", cfg.formation.tracking_error},
                    {"auto_scale_margin", cfg.formation.auto_scale_margin},
                    {"solver_tol", cfg.formation.solver_tol},
                    {"multi_starts", cfg.formation.multi_starts}};
  if (cfg.formation.planar_scale)
    j["formation"]["planar_scale"] = *cfg.formation.planar_scale;
  else
    j["formation"]["planar_scale"] = "auto";
  j["fsm"] = {{"eps_dist", cfg.fsm.eps_dist},
              {"eps_attitude", cfg.fsm.eps_attitude},
              {"connect_time", cfg.fsm.connect_time},
              {"herd_speed_fraction", cfg.fsm.herd_speed_fraction},
              {"tracking",
               {{"kp", cfg.fsm.tracking.kp},
                {"kv", cfg.fsm.tracking.kv},
                {"alpha", cfg.fsm.tracking.alpha}}},
              {"seeking",
               {{"k1", cfg.fsm.seeking.k1},
                {"attitude_p", cfg.fsm.seeking.attitude_p},
                {"attitude_d", cfg.fsm.seeking.attitude_d},
                {"u_trans_max", cfg.fsm.seeking.u_trans_max},
                {"u_rot_max", cfg.fsm.seeking.u_rot_max}}},
              {"herding",
               {{"approach_gain", cfg.fsm.herding.approach_gain},
                {"velocity_gain", cfg.fsm.herding.velocity_gain},
                {"u_max", cfg.fsm.herding.u_max}}}};
  j["dominance"] = {{"delta", cfg.dominance.delta},
                    {"grid_theta", cfg.dominance.grid_theta},
                    {"grid_phi", cfg.dominance.grid_phi}};
  return j;
}

}  // namespace stringnet
