// Command-line front end: formation synthesis, dominance sweeps, herding
// simulations and batch success maps.

#include "stringnet/stringnet.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace stringnet;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

ScenarioConfig load_config(const std::string& path, std::uint64_t seed_override,
                           double dt_override, std::string* raw = nullptr) {
  const std::string text = read_file(path);
  if (raw) *raw = text;
  ScenarioConfig cfg = parse_scenario_text(text, path);
  if (seed_override != static_cast<std::uint64_t>(-1)) cfg.seed = seed_override;
  if (dt_override > 0.0) cfg.dt = dt_override;
  return cfg;
}

fs::path make_run_dir(const fs::path& out, std::uint64_t seed) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y%m%dT%H%M%SZ", &tm);
  fs::path dir = out / ("run_" + std::string(stamp) + "_seed" + std::to_string(seed));
  int k = 1;
  fs::path candidate = dir;
  while (fs::exists(candidate)) candidate = dir.string() + "_" + std::to_string(k++);
  fs::create_directories(candidate);
  return candidate;
}

void export_mesh(const fs::path& path, const StringNetGraph& net,
                 const std::vector<Vec3>& positions) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  write_off(os, net, positions);
}

ThomsonOptions solver_options(const ScenarioConfig& cfg) {
  ThomsonOptions opt;
  opt.tol = cfg.formation.solver_tol;
  opt.multi_starts = cfg.formation.multi_starts;
  opt.seed = cfg.seed;
  return opt;
}

int cmd_formation(const std::string& config_path, const fs::path& out,
                  std::uint64_t seed, double dt, bool auto_count) {
  ScenarioConfig cfg = load_config(config_path, seed, dt);
  const fs::path dir = make_run_dir(out, cfg.seed);

  const double rho_sn = min_net_radius(cfg.swarm.connectivity_radius,
                                       cfg.formation.max_edge_length,
                                       cfg.formation.tracking_error);
  SphereSolveCache cache(rho_sn, cfg.formation.max_edge_length, solver_options(cfg));

  int n = static_cast<int>(cfg.defender_positions.size());
  int iterations = 0;
  if (auto_count) {
    const auto res = min_defender_count(cfg.swarm.connectivity_radius,
                                        cfg.formation.max_edge_length,
                                        cfg.formation.tracking_error, cache);
    n = res.count;
    iterations = res.iterations;
  }
  const SolvedSphere& sphere = cache.at(n);
  const FormationFamily fam =
      build_formation_family(sphere, cfg.formation.max_edge_length,
                             cfg.formation.planar_scale);
  const auto cond = check_condition1(fam.spherical.mesh, fam.spherical.relative_positions);

  export_mesh(dir / "spherical.off", fam.spherical.mesh, fam.spherical.relative_positions);
  export_mesh(dir / "hemispherical.off", fam.hemispherical.mesh,
              fam.hemispherical.relative_positions);
  export_mesh(dir / "planar.off", fam.planar.mesh, fam.planar.relative_positions);

  Json report;
  report["defender_count"] = n;
  report["auto_count"] = auto_count;
  report["iterations"] = iterations;
  report["rho_sn"] = fam.rho_sn;
  report["max_edge"] = sphere.max_edge;
  report["avg_edge"] = sphere.avg_edge;
  report["condition1"] = cond.pass;
  report["k_pl"] = fam.k_pl;
  report["planar_radius"] = fam.planar.radius;
  write_file(dir / "formation.json", report.dump(2) + "\n");

  std::cout << "run dir: " << dir.string() << "\n"
            << "N_d = " << n << (auto_count ? " (auto, iterations=" + std::to_string(iterations) + ")" : "")
            << "\nrho_sn = " << fam.rho_sn << "\nR_sb_max = " << sphere.max_edge
            << "\ncondition1 = " << (cond.pass ? "pass" : "FAIL")
            << "\nk_pl = " << fam.k_pl << "\n";
  return 0;
}

int cmd_ratio_table(const std::string& config_path, const fs::path& out,
                    std::uint64_t seed, int nmin, int nmax) {
  ScenarioConfig cfg = load_config(config_path, seed, -1.0);
  const fs::path dir = make_run_dir(out, cfg.seed);
  const double rho_sn = min_net_radius(cfg.swarm.connectivity_radius,
                                       cfg.formation.max_edge_length,
                                       cfg.formation.tracking_error);
  SphereSolveCache cache(rho_sn, cfg.formation.max_edge_length, solver_options(cfg));
  const auto rows = precomputed_ratio_table(nmin, nmax, cache);
  std::ofstream os(dir / "ratio_table.csv");
  write_ratio_table_csv(os, rows);
  std::cout << "run dir: " << dir.string() << "\nrows: " << rows.size() << "\n";
  return 0;
}

DominanceParams dominance_params_from(const ScenarioConfig& cfg, double planar_radius) {
  DominanceParams p;
  p.delta = cfg.dominance.delta;
  p.gather_margin = cfg.fsm.connect_time;
  p.planar_radius = planar_radius;
  p.max_swarm_radius = cfg.swarm.max_connectivity_radius;
  p.attacker_max_accel = cfg.attacker_params.max_accel;
  p.defender_max_accel = cfg.defender_params.max_accel;
  p.drag_coeff = cfg.defender_params.drag_coeff;
  p.protected_radius = cfg.areas.protected_radius;
  return p;
}

double planar_radius_for(const ScenarioConfig& cfg) {
  const double rho_sn = min_net_radius(cfg.swarm.connectivity_radius,
                                       cfg.formation.max_edge_length,
                                       cfg.formation.tracking_error);
  SphereSolveCache cache(rho_sn, cfg.formation.max_edge_length, solver_options(cfg));
  const SolvedSphere& sphere = cache.at(static_cast<int>(cfg.defender_positions.size()));
  const FormationFamily fam = build_formation_family(
      sphere, cfg.formation.max_edge_length, cfg.formation.planar_scale);
  return fam.planar.radius;
}

int cmd_dominance(const std::string& config_path, const fs::path& out,
                  std::uint64_t seed, int ntheta, int nphi) {
  ScenarioConfig cfg = load_config(config_path, seed, -1.0);
  const fs::path dir = make_run_dir(out, cfg.seed);
  DominanceParams p = dominance_params_from(cfg, planar_radius_for(cfg));
  std::vector<Vec3> defenders;
  for (const auto& d : cfg.defender_positions)
    defenders.push_back(d - cfg.areas.protected_center);
  const auto boundary = dominance_boundary(defenders, p,
                                           ntheta > 0 ? ntheta : cfg.dominance.grid_theta,
                                           nphi > 0 ? nphi : cfg.dominance.grid_phi);
  std::ofstream os(dir / "boundary.csv");
  write_boundary_csv(os, boundary);
  std::cout << "run dir: " << dir.string() << "\ndirections: "
            << boundary.thetas.size() * boundary.phis.size() << "\n";
  return 0;
}

int cmd_simulate(const std::string& config_path, const fs::path& out,
                 std::uint64_t seed, double dt) {
  std::string raw;
  ScenarioConfig cfg = load_config(config_path, seed, dt, &raw);
  const fs::path dir = make_run_dir(out, cfg.seed);
  write_file(dir / "config.json", raw);

  Simulation sim(cfg);
  std::ofstream traj(dir / "trajectory.csv");
  const SimulationMetrics metrics = sim.run(&traj);
  write_file(dir / "metrics.json", metrics_to_json(metrics).dump(2) + "\n");

  std::cout << "run dir: " << dir.string() << "\noutcome: " << metrics.outcome
            << "\nherding_success: " << (metrics.herding_success ? "true" : "false")
            << "\nend_time: " << metrics.end_time << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const fs::path& out, std::uint64_t seed,
              double dt, int ntheta, int nphi, double radius, int jobs) {
  std::string raw;
  ScenarioConfig base = load_config(config_path, seed, dt, &raw);
  if (base.attacker_positions.empty())
    throw Error("sweep: config has no attackers");
  const fs::path dir = make_run_dir(out, base.seed);
  write_file(dir / "config.json", raw);

  struct Cell {
    double theta, phi;
    std::string outcome;
    bool success = false;
  };
  std::vector<Cell> cells;
  for (int i = 0; i < ntheta; ++i)
    for (int j = 0; j < nphi; ++j)
      cells.push_back({M_PI * (i + 0.5) / ntheta, -M_PI + 2.0 * M_PI * j / nphi, "", false});

  const Vec3 center0 = [&] {
    Vec3 c = Vec3::Zero();
    for (const auto& p : base.attacker_positions) c += p;
    return Vec3(c / base.attacker_positions.size());
  }();

  std::atomic<size_t> next{0};
  std::mutex io;
  auto worker = [&]() {
    for (;;) {
      const size_t k = next.fetch_add(1);
      if (k >= cells.size()) return;
      Cell& cell = cells[k];
      ScenarioConfig cfg = base;
      const Vec3 target = cfg.areas.protected_center +
                          radius * to_cartesian(SphericalPoint{1.0, cell.theta, cell.phi});
      const Vec3 shift = target - center0;
      for (auto& p : cfg.attacker_positions) p += shift;
      try {
        cfg.validate();
        Simulation sim(cfg);
        const auto metrics = sim.run(nullptr);
        cell.outcome = metrics.outcome;
        cell.success = metrics.herding_success;
      } catch (const Error& e) {
        cell.outcome = "error";
        std::lock_guard<std::mutex> lock(io);
        std::cerr << "cell (" << cell.theta << "," << cell.phi << "): " << e.what() << "\n";
      }
    }
  };
  const int nworkers = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::ofstream os(dir / "sweep.csv");
  os.precision(17);
  os << "theta,phi,r,outcome,success\n";
  for (const auto& c : cells)
    os << c.theta << ',' << c.phi << ',' << radius << ',' << c.outcome << ','
       << (c.success ? 1 : 0) << '\n';
  std::cout << "run dir: " << dir.string() << "\ncells: " << cells.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"3D StringNet herding: formations, dominance regions, simulation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = static_cast<std::uint64_t>(-1);
  double dt = -1.0;

  auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    if (needs_config)
      cmd->add_option("--config", config_path, "scenario config (JSON)")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "seed override");
  };

  auto* formation = app.add_subcommand("formation", "synthesize and export the formations");
  add_common(formation);
  bool auto_count = false;
  formation->add_flag("--auto-count", auto_count,
                      "search the minimal defender count instead of using the config");

  auto* table = app.add_subcommand("ratio-table", "relative edge-length table (CSV)");
  add_common(table);
  int nmin = 4, nmax = 40;
  table->add_option("--nmin", nmin, "first defender count");
  table->add_option("--nmax", nmax, "last defender count");

  auto* dominance = app.add_subcommand("dominance", "dominance-boundary sweep (CSV)");
  add_common(dominance);
  int ntheta = 0, nphi = 0;
  dominance->add_option("--ntheta", ntheta, "polar grid size");
  dominance->add_option("--nphi", nphi, "azimuth grid size");

  auto* simulate = app.add_subcommand("simulate", "run one herding simulation");
  add_common(simulate);
  simulate->add_option("--dt", dt, "time step override");

  auto* sweep = app.add_subcommand("sweep", "batch simulations over attacker start grid");
  add_common(sweep);
  sweep->add_option("--dt", dt, "time step override");
  int sweep_ntheta = 4, sweep_nphi = 8, jobs = 2;
  double sweep_radius = 0.0;
  sweep->add_option("--ntheta", sweep_ntheta, "polar grid size");
  sweep->add_option("--nphi", sweep_nphi, "azimuth grid size");
  sweep->add_option("--radius", sweep_radius, "attacker start distance")->required();
  sweep->add_option("--jobs", jobs, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (formation->parsed())
      return cmd_formation(config_path, out_dir, seed, dt, auto_count);
    if (table->parsed()) return cmd_ratio_table(config_path, out_dir, seed, nmin, nmax);
    if (dominance->parsed())
      return cmd_dominance(config_path, out_dir, seed, ntheta, nphi);
    if (simulate->parsed()) return cmd_simulate(config_path, out_dir, seed, dt);
    if (sweep->parsed())
      return cmd_sweep(config_path, out_dir, seed, dt, sweep_ntheta, sweep_nphi,
                       sweep_radius, jobs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
