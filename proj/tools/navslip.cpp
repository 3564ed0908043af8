// navslip command line: simulate, sweep, adn, diagnose.
//
// Exit codes: 0 success; 1 runtime failure (or a failed check: adn
// condition, diagnose tolerance); 2 unreadable or invalid input.

#include "navslip/adn/io.hpp"
#include "navslip/config.hpp"
#include "navslip/diagnostics.hpp"
#include "navslip/sweep.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

namespace fs = std::filesystem;
using namespace navslip;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadInput = 2;

fs::path out_dir(const std::string& out, const std::string& input, const std::string& verb) {
  if (!out.empty()) return out;
  return fs::path("runs") / (verb + "-" + fs::path(input).stem().string());
}

void write_text(const fs::path& file, const std::function<void(std::ostream&)>& f) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error(file.string() + ": cannot write");
  f(os);
}

/// Largest C with E(t) <= E(0) exp(C t) on the series (0 when E never grows).
double energy_growth_constant(const Trajectory& traj) {
  const double e0 = traj.series.front().energy;
  double c = 0.0;
  if (!(e0 > 0.0)) return c;
  for (const auto& row : traj.series) {
    if (row.t > 0.0 && row.energy > e0) c = std::max(c, std::log(row.energy / e0) / row.t);
  }
  return c;
}

json resolved(const SimConfig& c, const Tolerances& tol, const Trajectory& traj) {
  json j = to_json(c);
  j["tol"] = to_json(tol);
  j["resolved"] = {{"steps", traj.steps},
                   {"dt_first", traj.series.size() > 1 ? traj.series[1].dt : 0.0},
                   {"dt_min", traj.dt_min},
                   {"dt_last", traj.dt_last},
                   {"snapshots", traj.snapshots.size()}};
  return j;
}

int run_simulate(const std::string& input, const std::string& out, bool deterministic) {
  const auto rc = run_config_from_json(read_json_file(input));
  const auto start = std::chrono::steady_clock::now();
  const auto traj = simulate(rc.sim);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  const auto dir = out_dir(out, input, "simulate");
  fs::create_directories(dir);
  const json cfg = resolved(rc.sim, rc.tol, traj);
  write_json_file(dir / "config-resolved.json", cfg);
  write_text(dir / "series.csv", [&](std::ostream& os) { write_series_csv(os, traj); });
  write_trajectory(dir, traj);

  // Initial data need not satisfy the wall condition; the check is for t > 0.
  double bc = 0.0;
  std::vector<double> sup_lp(rc.sim.enstrophy_p.size(), 0.0);
  for (const auto& row : traj.series) {
    if (row.t > 0.0) bc = std::max(bc, row.bc_residual);
    for (std::size_t i = 0; i < sup_lp.size(); ++i) sup_lp[i] = std::max(sup_lp[i], row.enstrophy[i]);
  }
  json sup = json::object();
  for (std::size_t i = 0; i < sup_lp.size(); ++i) {
    std::ostringstream key;
    key << rc.sim.enstrophy_p[i];
    sup[key.str()] = sup_lp[i];
  }
  const auto& last = traj.series.back();
  json rep{{"config", cfg},
           {"t_end", last.t},
           {"energy_initial", traj.series.front().energy},
           {"energy_final", last.energy},
           {"energy_non_increasing", energy_non_increasing(traj, 1e-6)},
           {"energy_growth_constant", energy_growth_constant(traj)},
           {"sup_enstrophy", sup},
           {"bc_residual_initial", traj.series.front().bc_residual},
           {"max_bc_residual", bc},
           {"bc_residual_within_tol", bc <= rc.tol.navier},
           {"wall_ms", deterministic ? 0.0 : ms}};
  write_json_file(dir / "report.json", rep);
  std::cout << "simulate: " << traj.steps << " steps, output in " << dir.string() << "\n";
  return kOk;
}

int run_sweep_verb(const std::string& input, const std::string& out, bool deterministic) {
  const auto cfg = sweep_config_from_json(read_json_file(input));
  const auto rep = run_sweep(cfg);
  const auto dir = out_dir(out, input, "sweep");
  fs::create_directories(dir);
  json resolved_cfg = to_json(cfg);
  resolved_cfg["resolved"] = {{"euler_reference", to_json(rep.euler, deterministic)},
                              {"euler_base", to_json(rep.euler_base, deterministic)}};
  write_json_file(dir / "config-resolved.json", resolved_cfg);
  write_text(dir / "series.csv", [&](std::ostream& os) { write_sweep_csv(os, rep, deterministic); });
  json j = to_json(rep, cfg, deterministic);
  j["config"] = resolved_cfg;
  j["threads"] = deterministic ? json(nullptr) : json(thread_count());
  write_json_file(dir / "report.json", j);
  std::cout << "sweep: " << cfg.nu_list.size() << " viscosities, output in " << dir.string() << "\n";
  return kOk;
}

int run_adn_verb(const std::string& input, const std::string& out) {
  adn::AdnRun run;
  try {
    run = adn::read_adn_problem(input);
    adn::principal_parts(run.problem);  // consistency errors are input errors
  } catch (const adn::AdnError& e) {
    std::cerr << "adn: " << e.what() << "\n";
    return kBadInput;
  }
  const auto rep = adn::check_all(run.problem, run.n_boundary_samples, run.n_xi_samples);
  const auto dir = out_dir(out, input, "adn");
  fs::create_directories(dir);
  write_json_file(dir / "config-resolved.json", read_json_file(input));
  write_json_file(dir / "report.json", adn::to_json(rep));
  std::cout << "adn: " << rep.problem << (rep.passed() ? " passes" : " fails") << ", report in "
            << dir.string() << "\n";
  if (!rep.passed()) {
    for (const auto* c : {&rep.adn, &rep.uniform, &rep.regular, &rep.complementing}) {
      if (!c->pass) std::cout << "  failed: " << c->name << (c->witness ? " (" + c->witness->note + ")" : "") << "\n";
    }
  }
  return rep.passed() ? kOk : kFailed;
}

// Divergence-free tangent test field with compact support.
VectorField diagnose_test_field(const PolarGrid& g) {
  const auto b = InitialCondition::bump({-0.2, 0.1}, 0.4, 1.0);
  return perp_grad(ScalarField::from_function(g, [&](double r, double th) {
    return b.bump_value(r * std::cos(th), r * std::sin(th));
  }));
}

int run_diagnose(const std::string& input, const std::string& out) {
  const fs::path traj_dir(input);
  const json cfg_json = read_json_file(traj_dir / "config-resolved.json");
  json sim_keys = cfg_json;
  sim_keys.erase("resolved");
  const auto rc = run_config_from_json(sim_keys);
  const auto traj = read_trajectory(traj_dir, rc.sim);
  const NsSolver solver(rc.sim);
  const auto& g = solver.grid();
  const double nu = rc.sim.nu;

  std::vector<double> navier, pressure_slack, pressure_rhs;
  for (const auto& s : traj.snapshots) navier.push_back(navier_residuals(s.u, s.omega, solver.trace()).navier.max_abs);
  const auto pressures = trajectory_pressures(traj, solver.trace());
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const auto pe = pressure_estimate(pressures[i], traj.snapshots[i].u, traj.snapshots[i].omega, nu);
    pressure_slack.push_back(pe.slack);
    pressure_rhs.push_back(pe.rhs);
  }
  const auto weak = weak_form_residual(traj, diagnose_test_field(g), nu, solver.trace());
  std::optional<BalanceReport> balance;
  if (traj.snapshots.size() >= 2) {
    balance = enstrophy_balance_residual(traj, ExtendedTangent::build(g, rc.sim.alpha), nu, pressures);
  }
  double h2 = std::nan("");
  try {
    h2 = h2_ratio(traj.snapshots.back().u);
  } catch (const std::invalid_argument&) {
    // zero velocity: the ratio is undefined
  }

  const auto dir = out.empty() ? traj_dir / "diagnose" : fs::path(out);
  fs::create_directories(dir);
  write_json_file(dir / "config-resolved.json", cfg_json);
  write_text(dir / "series.csv", [&](std::ostream& os) {
    os.precision(17);
    os << "t,navier_residual,weak_form_residual,pressure_slack,pressure_rhs\n";
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
      os << traj.snapshots[i].t << ',' << navier[i] << ',' << weak.values[i] << ',' << pressure_slack[i] << ','
         << pressure_rhs[i] << '\n';
    }
  });

  double navier_max = 0.0;
  for (std::size_t i = 0; i < navier.size(); ++i) {
    if (traj.snapshots[i].t > 0.0) navier_max = std::max(navier_max, navier[i]);
  }
  double pressure_worst = std::numeric_limits<double>::infinity();
  bool pressure_ok = true;
  for (std::size_t i = 0; i < pressure_slack.size(); ++i) {
    pressure_ok = pressure_ok && pressure_slack[i] >= -1e-6 * pressure_rhs[i];
    pressure_worst = std::min(pressure_worst, pressure_slack[i]);
  }
  const double balance_rel = balance && balance->scale > 0.0 ? balance->max_abs / balance->scale : 0.0;
  const bool navier_ok = navier_max <= rc.tol.navier;
  const bool weak_ok = weak.max_abs <= rc.tol.weakform;
  const bool balance_ok = balance_rel <= rc.tol.balance;
  json rep{{"config", cfg_json},
           {"snapshots", traj.snapshots.size()},
           {"navier_residual_initial", navier.front()},
           {"navier_residual_max", navier_max},
           {"navier_ok", navier_ok},
           {"weak_form_residual_max", weak.max_abs},
           {"weak_form_ok", weak_ok},
           {"enstrophy_balance_defect_max", balance ? json(balance->max_abs) : json(nullptr)},
           {"enstrophy_balance_relative", balance_rel},
           {"enstrophy_balance_ok", balance_ok},
           {"pressure_estimate_min_slack", pressure_worst},
           {"pressure_estimate_ok", pressure_ok},
           {"h2_ratio_final", std::isfinite(h2) ? json(h2) : json(nullptr)}};
  const bool ok = navier_ok && weak_ok && balance_ok && pressure_ok;
  rep["passed"] = ok;
  write_json_file(dir / "report.json", rep);
  std::cout << "diagnose: " << (ok ? "all checks within tolerance" : "checks outside tolerance") << ", report in "
            << dir.string() << "\n";
  return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Navier-slip vorticity solver, viscosity sweeps and ADN checks"};
  app.require_subcommand(1);
  std::string input, out;
  bool deterministic = false;

  auto* sim = app.add_subcommand("simulate", "Run one simulation");
  sim->add_option("config", input, "config JSON")->required();
  auto* sweep = app.add_subcommand("sweep", "Run the vanishing-viscosity sweep");
  sweep->add_option("config", input, "sweep config JSON")->required();
  auto* adn = app.add_subcommand("adn", "Check a boundary value problem for ADN ellipticity");
  adn->add_option("problem", input, "problem JSON")->required();
  auto* diag = app.add_subcommand("diagnose", "Residual diagnostics of a stored trajectory");
  diag->add_option("trajectory-dir", input, "directory written by simulate")->required();
  for (auto* s : {sim, sweep, adn, diag}) s->add_option("-o,--out", out, "output directory");
  for (auto* s : {sim, sweep}) {
    s->add_flag("--deterministic", deterministic, "write zero wall times so outputs compare bitwise");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kBadInput;
  }

  try {
    if (*sim) return run_simulate(input, out, deterministic);
    if (*sweep) return run_sweep_verb(input, out, deterministic);
    if (*adn) return run_adn_verb(input, out);
    if (*diag) return run_diagnose(input, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kOk;
}
