#pragma once

/// \file io.hpp
/// \brief ADN problem files and JSON reports.
///
/// A problem file is either {"builtin": "<name>", "alpha": ..., "kappa": ...}
/// or an explicit system:
///
///   {"name": "...", "M": 2, "s": [0,0], "t": [2,2], "r": [-2,-1],
///    "L": [{"i": 1, "j": 1, "mi": [2,0], "c": 1}, ...],
///    "B": [{"i": 1, "j": 1, "mi": [0,0], "c": "n1"}, ...]}
///
/// Indices i, j are 1-based. A coefficient c is a number, a symbol (n1, n2,
/// t1, t2, x1, x2, alpha, kappa, alpha-kappa, optionally prefixed by "-"), or
/// an array whose entries (numbers or symbols) are multiplied.

#include "navslip/adn/adn.hpp"
#include "navslip/config.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace navslip::adn {

using navslip::json;

/// Sampling counts used when a file does not set them.
struct AdnRun {
  AdnProblem problem;
  int n_boundary_samples = 32;
  int n_xi_samples = 8;
};

namespace detail {

using Coefficient = std::function<double(const Point&)>;

inline Coefficient symbol(const std::string& name, const AlphaSpec& alpha, double kappa, const std::string& path) {
  if (!name.empty() && name[0] == '-') {
    auto f = symbol(name.substr(1), alpha, kappa, path);
    return [f](const Point& x) { return -f(x); };
  }
  if (name == "n1") return [](const Point& x) { return normal_at(x)[0]; };
  if (name == "n2") return [](const Point& x) { return normal_at(x)[1]; };
  if (name == "t1") return [](const Point& x) { return tangent_at(x)[0]; };
  if (name == "t2") return [](const Point& x) { return tangent_at(x)[1]; };
  if (name == "x1") return [](const Point& x) { return x[0]; };
  if (name == "x2") return [](const Point& x) { return x[1]; };
  if (name == "alpha") return [alpha](const Point& x) { return alpha(angle_of(x)); };
  if (name == "kappa") return [kappa](const Point&) { return kappa; };
  if (name == "alpha-kappa") return [alpha, kappa](const Point& x) { return alpha(angle_of(x)) - kappa; };
  throw AdnError(path + ": unknown coefficient symbol \"" + name + "\"");
}

inline Coefficient coefficient(const json& c, const AlphaSpec& alpha, double kappa, const std::string& path) {
  if (c.is_number()) {
    const double v = c.get<double>();
    return [v](const Point&) { return v; };
  }
  if (c.is_string()) return symbol(c.get<std::string>(), alpha, kappa, path);
  if (c.is_array() && !c.empty()) {
    std::vector<Coefficient> fs;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i].is_array()) throw AdnError(path + "[" + std::to_string(i) + "]: nested products are not allowed");
      fs.push_back(coefficient(c[i], alpha, kappa, path + "[" + std::to_string(i) + "]"));
    }
    return [fs](const Point& x) {
      double acc = 1.0;
      for (const auto& f : fs) acc *= f(x);
      return acc;
    };
  }
  throw AdnError(path + ": expected a number, a symbol or a nonempty array");
}

inline std::vector<int> ints(const json& j, const std::string& path) {
  if (!j.is_array()) throw AdnError(path + ": expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer()) throw AdnError(path + "[" + std::to_string(i) + "]: expected an integer");
    out.push_back(j[i].get<int>());
  }
  return out;
}

inline std::vector<Term> terms(const json& j, const AlphaSpec& alpha, double kappa, const std::string& path) {
  if (!j.is_array()) throw AdnError(path + ": expected an array of terms");
  std::vector<Term> out;
  for (std::size_t n = 0; n < j.size(); ++n) {
    const std::string p = path + "[" + std::to_string(n) + "]";
    const auto& t = j[n];
    if (!t.is_object()) throw AdnError(p + ": expected an object");
    for (const auto& [k, v] : t.items()) {
      if (k != "i" && k != "j" && k != "mi" && k != "c") throw AdnError(p + "." + k + ": unknown key");
    }
    for (const char* k : {"i", "j", "mi", "c"}) {
      if (!t.contains(k)) throw AdnError(p + "." + k + ": missing");
    }
    if (!t["i"].is_number_integer() || !t["j"].is_number_integer()) {
      throw AdnError(p + ": i and j must be integers");
    }
    out.push_back({t["i"].get<int>() - 1, t["j"].get<int>() - 1, ints(t["mi"], p + ".mi"),
                   coefficient(t["c"], alpha, kappa, p + ".c")});
  }
  return out;
}

}  // namespace detail

/// Parses a problem object. Structural errors carry the key path;
/// consistency errors come from PrincipalParts when the run starts.
inline AdnRun adn_run_from_json(const json& j) {
  if (!j.is_object()) throw AdnError("problem: expected an object");
  AdnRun run;
  AlphaSpec alpha = AlphaSpec::constant(0.0);
  double kappa = 1.0;
  try {
    if (j.contains("alpha")) alpha = alpha_from_json(j["alpha"], "problem.alpha");
    if (j.contains("kappa")) kappa = cfg::number(j["kappa"], "problem.kappa");
    if (j.contains("samples")) {
      cfg::only_keys(j["samples"], "problem.samples", {"boundary", "xi"});
      if (j["samples"].contains("boundary")) {
        run.n_boundary_samples = cfg::integer(j["samples"]["boundary"], "problem.samples.boundary");
      }
      if (j["samples"].contains("xi")) run.n_xi_samples = cfg::integer(j["samples"]["xi"], "problem.samples.xi");
    }
  } catch (const ConfigError& e) {
    throw AdnError(e.what());
  }

  if (j.contains("builtin")) {
    for (const auto& [k, v] : j.items()) {
      if (k != "builtin" && k != "alpha" && k != "kappa" && k != "samples") {
        throw AdnError("problem." + k + ": not allowed together with builtin");
      }
    }
    if (!j["builtin"].is_string()) throw AdnError("problem.builtin: expected a string");
    const auto name = j["builtin"].get<std::string>();
    if (name == "navier_laplacian") {
      run.problem = navier_laplacian_problem(alpha, kappa);
    } else if (name == "duplicated_row") {
      run.problem = duplicated_row_problem();
    } else if (name == "diagonal_degenerate") {
      run.problem = diagonal_degenerate_problem();
    } else if (name == "dirichlet") {
      run.problem = dirichlet_problem();
    } else {
      throw AdnError("problem.builtin: unknown problem \"" + name + "\"");
    }
    return run;
  }

  for (const auto& [k, v] : j.items()) {
    static const std::vector<std::string> allowed{"name", "M", "m", "L", "B", "s", "t", "r", "alpha", "kappa", "samples"};
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) throw AdnError("problem." + k + ": unknown key");
  }
  for (const char* k : {"M", "L", "B", "s", "t", "r"}) {
    if (!j.contains(k)) throw AdnError(std::string("problem.") + k + ": missing");
  }
  auto& p = run.problem;
  p.name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "problem";
  if (!j["M"].is_number_integer()) throw AdnError("problem.M: expected an integer");
  p.M = j["M"].get<int>();
  p.s = detail::ints(j["s"], "problem.s");
  p.t = detail::ints(j["t"], "problem.t");
  p.r = detail::ints(j["r"], "problem.r");
  int total = 0;
  for (int v : p.s) total += v;
  for (int v : p.t) total += v;
  p.m = total / 2;
  if (j.contains("m")) {
    if (!j["m"].is_number_integer()) throw AdnError("problem.m: expected an integer");
    p.m = j["m"].get<int>();
  }
  p.L = detail::terms(j["L"], alpha, kappa, "problem.L");
  p.B = detail::terms(j["B"], alpha, kappa, "problem.B");
  p.boundary = disk_boundary;
  return run;
}

inline AdnRun read_adn_problem(const std::filesystem::path& file) {
  json j;
  try {
    j = read_json_file(file);
  } catch (const ConfigError& e) {
    throw AdnError(e.what());
  }
  return adn_run_from_json(j);
}

inline json to_json(const std::vector<cplx>& v) {
  json out = json::array();
  for (const auto& z : v) out.push_back({z.real(), z.imag()});
  return out;
}

inline json to_json(const ConditionVerdict& c) {
  json j{{"name", c.name}, {"pass", c.pass}, {"samples", c.samples}};
  if (c.witness) {
    j["witness"] = {{"x", c.witness->x},
                    {"xi", c.witness->xi},
                    {"xi_prime", c.witness->xi_prime},
                    {"coefficients", to_json(c.witness->coefficients)},
                    {"note", c.witness->note}};
  }
  return j;
}

inline json to_json(const AdnReport& r) {
  return {{"problem", r.problem},
          {"passed", r.passed()},
          {"conditions", {to_json(r.adn), to_json(r.uniform), to_json(r.regular), to_json(r.complementing)}},
          {"m", r.m},
          {"m_from_degree", r.m_from_degree},
          {"det_min", r.det_min},
          {"det_max", r.det_max},
          {"uniform_constant", r.uniform_constant},
          {"n_boundary_samples", r.n_boundary_samples},
          {"n_xi_samples", r.n_xi_samples},
          {"max_division_residual", r.max_division_residual},
          {"min_sv_ratio", std::isfinite(r.min_sv_ratio) ? json(r.min_sv_ratio) : json(nullptr)}};
}

}  // namespace navslip::adn
