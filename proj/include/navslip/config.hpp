#pragma once

/// \file config.hpp
/// \brief JSON form of the simulation inputs and of trajectories on disk.
///
/// Unknown keys are rejected so that a typo cannot silently fall back to a
/// default. Errors carry the key path.

#include "navslip/field.hpp"
#include "navslip/geometry.hpp"
#include "navslip/ns_solver.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace navslip {

using nlohmann::json;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Residual tolerances for the diagnose verb.
struct Tolerances {
  double navier = 5e-2;
  double weakform = 5e-2;
  double balance = 5e-2;
};

namespace cfg {

inline void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError(path + "." + k + ": unknown key");
  }
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

inline int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<int>();
}

inline Vec2 point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path + ": expected [x, y]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

inline std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

template <class F>
auto at(const json& j, const std::string& path, const char* key, F&& f) {
  if (!j.contains(key)) throw ConfigError(path + "." + key + ": missing");
  return f(j.at(key), path + "." + key);
}

}  // namespace cfg

/// alpha: number | {"const": c} | {"fourier": [[k, a, b], ...]}; fourier
/// entries may also be objects {"k", "a", "b"}.
inline AlphaSpec alpha_from_json(const json& j, const std::string& path = "alpha") {
  if (j.is_number()) return AlphaSpec::constant(j.get<double>());
  if (!j.is_object() || j.size() != 1) throw ConfigError(path + ": expected {\"const\": c} or {\"fourier\": [...]}");
  if (j.contains("const")) return AlphaSpec::constant(cfg::number(j["const"], path + ".const"));
  cfg::only_keys(j, path, {"fourier"});
  const auto& terms = j.at("fourier");
  if (!terms.is_array()) throw ConfigError(path + ".fourier: expected an array");
  std::vector<AlphaSpec::Term> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string p = path + ".fourier[" + std::to_string(i) + "]";
    const auto& e = terms[i];
    AlphaSpec::Term t{0, 0.0, 0.0};
    if (e.is_array()) {
      if (e.size() != 3) throw ConfigError(p + ": expected [k, a_k, b_k]");
      t = {cfg::integer(e[0], p + "[0]"), cfg::number(e[1], p + "[1]"), cfg::number(e[2], p + "[2]")};
    } else {
      cfg::only_keys(e, p, {"k", "a", "b"});
      t.k = cfg::at(e, p, "k", cfg::integer);
      if (e.contains("a")) t.a = cfg::number(e["a"], p + ".a");
      if (e.contains("b")) t.b = cfg::number(e["b"], p + ".b");
    }
    out.push_back(t);
  }
  try {
    return AlphaSpec::fourier(std::move(out));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline json to_json(const AlphaSpec& a) {
  if (a.is_constant()) {
    double c = 0.0;
    for (const auto& t : a.terms()) c += t.k == 0 ? t.a : 0.0;
    return {{"const", c}};
  }
  json terms = json::array();
  for (const auto& t : a.terms()) terms.push_back(json::array({t.k, t.a, t.b}));
  return {{"fourier", terms}};
}

inline InitialCondition initial_from_json(const json& j, const std::string& path = "initial_condition") {
  if (!j.is_object() || j.size() != 1) {
    throw ConfigError(path + ": expected exactly one of const, bump, singular, modes");
  }
  const auto& [kind, v] = *j.items().begin();
  const std::string p = path + "." + kind;
  InitialCondition ic;
  if (kind == "const") {
    ic = InitialCondition::constant(cfg::number(v, p));
  } else if (kind == "bump") {
    cfg::only_keys(v, p, {"center", "radius", "amplitude"});
    ic = InitialCondition::bump(cfg::at(v, p, "center", cfg::point), cfg::at(v, p, "radius", cfg::number),
                                cfg::at(v, p, "amplitude", cfg::number));
  } else if (kind == "singular") {
    cfg::only_keys(v, p, {"center", "gamma", "p"});
    ic = InitialCondition::singular(cfg::at(v, p, "center", cfg::point), cfg::at(v, p, "gamma", cfg::number),
                                    cfg::at(v, p, "p", cfg::number));
  } else if (kind == "modes") {
    ic.kind = InitialCondition::Kind::Modes;
    if (!v.is_array()) throw ConfigError(p + ": expected an array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string q = p + "[" + std::to_string(i) + "]";
      InitialCondition::Mode m;
      if (v[i].is_array() && v[i].size() == 2) {  // [k, [c0, c1, ...]]
        m.k = cfg::integer(v[i][0], q + "[0]");
        m.coeffs = cfg::numbers(v[i][1], q + "[1]");
      } else {
        cfg::only_keys(v[i], q, {"k", "coeffs"});
        m.k = cfg::at(v[i], q, "k", cfg::integer);
        m.coeffs = cfg::at(v[i], q, "coeffs", cfg::numbers);
      }
      ic.modes.push_back(std::move(m));
    }
  } else {
    throw ConfigError(path + "." + kind + ": unknown initial condition");
  }
  try {
    ic.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return ic;
}

inline json to_json(const InitialCondition& ic) {
  using K = InitialCondition::Kind;
  switch (ic.kind) {
    case K::Const:
      return {{"const", ic.value}};
    case K::Bump:
      return {{"bump", {{"center", {ic.center.x, ic.center.y}}, {"radius", ic.radius}, {"amplitude", ic.amplitude}}}};
    case K::Singular:
      return {{"singular", {{"center", {ic.center.x, ic.center.y}}, {"gamma", ic.gamma}, {"p", ic.p}}}};
    case K::Modes: {
      json modes = json::array();
      for (const auto& m : ic.modes) modes.push_back(json::array({m.k, m.coeffs}));
      return {{"modes", modes}};
    }
  }
  return nullptr;
}

inline void apply_sim_keys(SimConfig& c, const json& j, const std::string& path) {
  if (j.contains("nu")) c.nu = cfg::number(j["nu"], path + ".nu");
  if (j.contains("t_end")) c.t_end = cfg::number(j["t_end"], path + ".t_end");
  if (j.contains("dt")) {
    const auto& d = j["dt"];
    if (d.is_string()) {
      if (d.get<std::string>() != "auto") throw ConfigError(path + ".dt: expected a number or \"auto\"");
      c.dt.reset();
    } else {
      c.dt = cfg::number(d, path + ".dt");
    }
  }
  if (j.contains("cfl")) c.cfl = cfg::number(j["cfl"], path + ".cfl");
  if (j.contains("dt_max")) c.dt_max = cfg::number(j["dt_max"], path + ".dt_max");
  if (j.contains("grid")) {
    cfg::only_keys(j["grid"], path + ".grid", {"n_r", "n_theta"});
    c.n_r = cfg::at(j["grid"], path + ".grid", "n_r", cfg::integer);
    c.n_theta = cfg::at(j["grid"], path + ".grid", "n_theta", cfg::integer);
  }
  if (j.contains("alpha")) c.alpha = alpha_from_json(j["alpha"], path + ".alpha");
  if (j.contains("initial_condition")) {
    c.initial = initial_from_json(j["initial_condition"], path + ".initial_condition");
  }
  if (j.contains("output_stride")) c.output_stride = cfg::integer(j["output_stride"], path + ".output_stride");
  if (j.contains("output_interval")) {
    c.output_interval = cfg::number(j["output_interval"], path + ".output_interval");
  }
  if (j.contains("enstrophy_p")) c.enstrophy_p = cfg::numbers(j["enstrophy_p"], path + ".enstrophy_p");
}

inline Tolerances tolerances_from_json(const json& j, const std::string& path) {
  cfg::only_keys(j, path, {"navier", "weakform", "balance"});
  Tolerances t;
  if (j.contains("navier")) t.navier = cfg::number(j["navier"], path + ".navier");
  if (j.contains("weakform")) t.weakform = cfg::number(j["weakform"], path + ".weakform");
  if (j.contains("balance")) t.balance = cfg::number(j["balance"], path + ".balance");
  return t;
}

struct RunConfig {
  SimConfig sim;
  Tolerances tol;
};

inline RunConfig run_config_from_json(const json& j, const std::string& path = "config") {
  cfg::only_keys(j, path, {"nu", "t_end", "dt", "cfl", "dt_max", "grid", "alpha", "initial_condition",
                           "output_stride", "output_interval", "enstrophy_p", "tol"});
  RunConfig rc;
  apply_sim_keys(rc.sim, j, path);
  if (j.contains("tol")) rc.tol = tolerances_from_json(j["tol"], path + ".tol");
  try {
    rc.sim.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return rc;
}

inline json to_json(const SimConfig& c) {
  json j;
  j["nu"] = c.nu;
  j["t_end"] = c.t_end;
  j["dt"] = c.dt ? json(*c.dt) : json("auto");
  j["cfl"] = c.cfl;
  j["dt_max"] = c.dt_max;
  j["grid"] = {{"n_r", c.n_r}, {"n_theta", c.n_theta}};
  j["alpha"] = to_json(c.alpha);
  j["initial_condition"] = to_json(c.initial);
  j["output_stride"] = c.output_stride;
  j["output_interval"] = c.output_interval;
  j["enstrophy_p"] = c.enstrophy_p;
  return j;
}

inline json to_json(const Tolerances& t) {
  return {{"navier", t.navier}, {"weakform", t.weakform}, {"balance", t.balance}};
}

/// Parses a file, turning parse errors into messages with line and column.
inline json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string() + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(file.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": JSON parse error: " + e.what());
  }
}

inline void write_json_file(const std::filesystem::path& file, const json& j) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error(file.string() + ": cannot write");
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Trajectories on disk
// ---------------------------------------------------------------------------

/// t, energy, enstrophy_p..., bc_residual
inline void write_series_csv(std::ostream& os, const Trajectory& traj) {
  os.precision(17);
  os << "t,energy";
  for (double p : traj.config.enstrophy_p) os << ",enstrophy_" << p;
  os << ",bc_residual\n";
  for (const auto& row : traj.series) {
    os << row.t << ',' << row.energy;
    for (double e : row.enstrophy) os << ',' << e;
    os << ',' << row.bc_residual << '\n';
  }
}

/// One JSON file per snapshot: vorticity values and its wall trace. Stream
/// function and velocity are rebuilt on load.
inline json snapshot_to_json(const Snapshot& s) {
  json j;
  j["t"] = s.t;
  j["n_r"] = s.omega.grid.n_r();
  j["n_theta"] = s.omega.grid.n_theta();
  j["omega"] = s.omega.values;
  if (s.omega.boundary) j["omega_wall"] = *s.omega.boundary;
  return j;
}

inline void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj) {
  std::filesystem::create_directories(dir / "snapshots");
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    std::ostringstream name;
    name << "snap_" << std::string(5 - std::min<std::size_t>(5, std::to_string(i).size()), '0') << i << ".json";
    std::ofstream out(dir / "snapshots" / name.str());
    out << snapshot_to_json(traj.snapshots[i]).dump() << '\n';
  }
}

/// Rebuilds a trajectory written by write_trajectory (series is not restored).
inline Trajectory read_trajectory(const std::filesystem::path& dir, const SimConfig& config) {
  Trajectory traj;
  traj.config = config;
  const PolarGrid g(config.n_r, config.n_theta);
  const PoissonDirichletSolver poisson(g);
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir / "snapshots")) {
    throw ConfigError((dir / "snapshots").string() + ": not a directory");
  }
  for (const auto& e : std::filesystem::directory_iterator(dir / "snapshots")) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const json j = read_json_file(f);
    if (j.at("n_r").get<int>() != g.n_r() || j.at("n_theta").get<int>() != g.n_theta()) {
      throw ConfigError(f.string() + ": grid does not match config-resolved.json");
    }
    ScalarField omega(g, j.at("omega").get<std::vector<double>>());
    if (omega.values.size() != g.size()) throw ConfigError(f.string() + ": wrong number of values");
    if (j.contains("omega_wall")) omega.boundary = j["omega_wall"].get<std::vector<double>>();
    auto psi = poisson.solve(omega);
    auto u = perp_grad(psi);
    auto wall_ut = u.ut_boundary.value_or(std::vector<double>{});
    traj.snapshots.push_back({j.at("t").get<double>(), std::move(omega), std::move(psi), std::move(u),
                              std::move(wall_ut)});
  }
  if (traj.snapshots.empty()) throw ConfigError(dir.string() + ": no snapshots");
  return traj;
}

}  // namespace navslip
