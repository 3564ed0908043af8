#pragma once

/// \file sweep.hpp
/// \brief The vanishing-viscosity experiment: one Euler reference on a refined
/// grid, one viscous run per nu on the base grid, compared at common snapshot
/// times. "sup_t" is the max over snapshot times.

#include "navslip/config.hpp"
#include "navslip/diagnostics.hpp"
#include "navslip/ns_solver.hpp"
#include "navslip/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace navslip {

struct SweepConfig {
  SimConfig base;
  std::vector<double> nu_list;
  std::vector<double> q_list{2.0};
  double p = 4.0;
  int euler_refinement_factor = 2;
  PhiSpec phi{{0.1, 0.1}, 0.6, 1.0};
  /// Allowed energy growth per unit time, relative to E(0).
  double energy_tol = 1e-6;

  void validate() const {
    base.validate();
    if (nu_list.empty()) throw ConfigError("sweep.nu_list: empty");
    for (std::size_t i = 0; i < nu_list.size(); ++i) {
      if (!(nu_list[i] > 0.0)) throw ConfigError("sweep.nu_list: entries must be > 0");
      if (i > 0 && !(nu_list[i] < nu_list[i - 1])) {
        throw ConfigError("sweep.nu_list: must be strictly descending");
      }
    }
    if (!(p > 2.0)) throw ConfigError("sweep.p: must be > 2");
    if (q_list.empty()) throw ConfigError("sweep.q_list: empty");
    for (double q : q_list) {
      if (!(q >= 1.0 && q < p)) throw ConfigError("sweep.q_list: need 1 <= q < p");
    }
    if (euler_refinement_factor < 2) throw ConfigError("sweep.euler_refinement_factor: must be >= 2");
    if (!(base.output_interval > 0.0)) {
      throw ConfigError("sweep.output_interval: must be > 0 so snapshot times coincide");
    }
    try {
      phi.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("sweep.") + e.what());
    }
  }
};

struct RunMeta {
  int n_r = 0;
  int n_theta = 0;
  long steps = 0;
  double dt_min = 0.0;
  double dt_last = 0.0;
  double wall_ms = 0.0;
};

struct SweepRow {
  double nu;
  double q;
  double sup_lq_diff;
  double sup_lp_enstrophy;
  bool energy_ok;
  double renorm_slack;
  double wall_ms;
  /// sup_lq_diff exceeds the Euler self-convergence floor for this q.
  bool above_floor;
};

struct ConvergenceReport {
  std::vector<SweepRow> rows;  ///< nu descending, then q in config order
  std::vector<RunMeta> runs;   ///< one per nu
  RunMeta euler;
  RunMeta euler_base;
  std::vector<double> floor;   ///< per q: sup_t |omega^E_base - omega^E_fine|_q
  double euler_sup_lp = 0.0;
  /// max over nu of max(0, -S(nu)) / nu
  double renorm_constant = 0.0;

  std::vector<double> column(double q, double SweepRow::*field) const {
    std::vector<double> out;
    for (const auto& r : rows) {
      if (r.q == q) out.push_back(r.*field);
    }
    return out;
  }
};

/// Thread count from NAVSLIP_THREADS, else the hardware concurrency.
inline unsigned thread_count() {
  if (const char* s = std::getenv("NAVSLIP_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && n >= 1) return static_cast<unsigned>(n);
    throw ConfigError("NAVSLIP_THREADS: expected a positive integer, got \"" + std::string(s) + "\"");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs tasks[i]() on up to n threads. The first exception is rethrown.
inline void parallel_for(std::size_t count, unsigned n, const std::function<void(std::size_t)>& task) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex m;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < count;) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned k = static_cast<unsigned>(std::min<std::size_t>(n, count));
  for (unsigned i = 1; i < k; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Cubic Lagrange interpolation of f onto the nodes of g, tensor product in
/// r (stencil clamped at the pole and the wall) and periodic theta.
inline ScalarField interpolate(const ScalarField& f, const PolarGrid& g) {
  const auto& src = f.grid;
  const int nr = src.n_r(), nt = src.n_theta();
  if (nr < 4 || nt < 4) throw std::invalid_argument("interpolate: source grid too small");
  const double dth = kTwoPi / nt;
  std::vector<int> jr(g.n_r());
  std::vector<std::vector<double>> wr(g.n_r());
  for (int j = 0; j < g.n_r(); ++j) {
    const double r = g.r(j);
    int j0 = static_cast<int>(std::floor(r * nr - 0.5)) - 1;
    j0 = std::clamp(j0, 0, nr - 4);
    std::vector<double> nodes{src.r(j0), src.r(j0 + 1), src.r(j0 + 2), src.r(j0 + 3)};
    jr[j] = j0;
    wr[j] = fd_weights(nodes, r, 0);
  }
  std::vector<int> kt(g.n_theta());
  std::vector<std::vector<double>> wt(g.n_theta());
  for (int k = 0; k < g.n_theta(); ++k) {
    const double th = g.theta(k);
    const int k1 = static_cast<int>(std::floor(th / dth + 1e-12));
    std::vector<double> nodes{(k1 - 1) * dth, k1 * dth, (k1 + 1) * dth, (k1 + 2) * dth};
    kt[k] = k1 - 1;
    wt[k] = fd_weights(nodes, th, 0);
  }
  ScalarField out(g);
  for (int j = 0; j < g.n_r(); ++j) {
    for (int k = 0; k < g.n_theta(); ++k) {
      double acc = 0.0;
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          const int kk = ((kt[k] + b) % nt + nt) % nt;
          acc += wr[j][a] * wt[k][b] * f.values[src.index(jr[j] + a, kk)];
        }
      }
      out.values[g.index(j, k)] = acc;
    }
  }
  return out;
}

/// Per-step energy check: E(t_{i+1}) - E(t_i) <= tol E(0) (t_{i+1} - t_i).
inline bool energy_non_increasing(const Trajectory& traj, double tol) {
  if (traj.series.empty()) return true;
  const double e0 = traj.series.front().energy;
  for (std::size_t i = 1; i < traj.series.size(); ++i) {
    const auto& a = traj.series[i - 1];
    const auto& b = traj.series[i];
    if (b.energy - a.energy > tol * e0 * (b.t - a.t)) return false;
  }
  return true;
}

namespace detail {

inline RunMeta meta(const Trajectory& t, double ms) {
  return {t.config.n_r, t.config.n_theta, t.steps, t.dt_min, t.dt_last, ms};
}

inline double sup_diff(const Trajectory& coarse, const Trajectory& fine, double q) {
  if (coarse.snapshots.size() != fine.snapshots.size()) {
    throw std::runtime_error("sweep: snapshot counts differ between runs");
  }
  const auto& g = coarse.snapshots.front().omega.grid;
  double sup = 0.0;
  for (std::size_t i = 0; i < coarse.snapshots.size(); ++i) {
    const auto& a = coarse.snapshots[i];
    const auto& b = fine.snapshots[i];
    if (std::abs(a.t - b.t) > 1e-9 * std::max(1.0, a.t)) {
      throw std::runtime_error("sweep: snapshot times differ between runs");
    }
    const auto ref = fine.config.n_r == coarse.config.n_r && fine.config.n_theta == coarse.config.n_theta
                         ? b.omega
                         : interpolate(b.omega, g);
    ScalarField d(g);
    for (std::size_t k = 0; k < g.size(); ++k) d.values[k] = a.omega.values[k] - ref.values[k];
    sup = std::max(sup, lp_norm(d, q));
  }
  return sup;
}

inline double sup_lp(const Trajectory& t, double p) {
  double s = 0.0;
  for (const auto& snap : t.snapshots) s = std::max(s, lp_norm(snap.omega, p));
  return s;
}

}  // namespace detail

/// Deterministic regardless of the thread count: every task writes only its
/// own slot and the report is assembled in order afterwards. If keep is
/// given it receives the fine Euler, base Euler and viscous runs, in order.
inline ConvergenceReport run_sweep(const SweepConfig& cfg, std::vector<Trajectory>* keep = nullptr) {
  cfg.validate();
  const std::size_t n_nu = cfg.nu_list.size();
  // Slots: 0 = fine Euler, 1 = base Euler, 2.. = viscous runs.
  std::vector<Trajectory> trajs(n_nu + 2);
  std::vector<double> ms(n_nu + 2, 0.0);
  auto config_for = [&](std::size_t i) {
    SimConfig c = cfg.base;
    if (i == 0) {
      c.nu = 0.0;
      c.n_r *= cfg.euler_refinement_factor;
      c.n_theta *= cfg.euler_refinement_factor;
      if (c.dt) *c.dt /= cfg.euler_refinement_factor;
      c.dt_max /= cfg.euler_refinement_factor;
    } else if (i == 1) {
      c.nu = 0.0;
    } else {
      c.nu = cfg.nu_list[i - 2];
    }
    c.output_stride = 0;
    return c;
  };
  parallel_for(n_nu + 2, thread_count(), [&](std::size_t i) {
    const auto c = config_for(i);
    const auto start = std::chrono::steady_clock::now();
    try {
      trajs[i] = simulate(c);
    } catch (const SimulationError& e) {
      throw SimulationError(std::string(i < 2 ? "Euler reference" : "nu=" + std::to_string(c.nu)) + ": " +
                                e.what(),
                            e.t);
    }
    ms[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  });

  ConvergenceReport rep;
  rep.euler = detail::meta(trajs[0], ms[0]);
  rep.euler_base = detail::meta(trajs[1], ms[1]);
  rep.euler_sup_lp = detail::sup_lp(trajs[0], cfg.p);
  for (double q : cfg.q_list) rep.floor.push_back(detail::sup_diff(trajs[1], trajs[0], q));
  for (std::size_t i = 0; i < n_nu; ++i) {
    const auto& t = trajs[i + 2];
    const double nu = cfg.nu_list[i];
    rep.runs.push_back(detail::meta(t, ms[i + 2]));
    const double lp = detail::sup_lp(t, cfg.p);
    const bool energy = energy_non_increasing(t, cfg.energy_tol);
    for (std::size_t iq = 0; iq < cfg.q_list.size(); ++iq) {
      const double q = cfg.q_list[iq];
      const auto slack = renormalized_slack(t, cfg.phi, q, nu, cfg.p);
      rep.renorm_constant = std::max(rep.renorm_constant, slack.constant);
      const double diff = detail::sup_diff(t, trajs[0], q);
      rep.rows.push_back({nu, q, diff, lp, energy, slack.s, ms[i + 2], diff > rep.floor[iq]});
    }
  }
  if (keep) *keep = std::move(trajs);
  return rep;
}

// ---------------------------------------------------------------------------
// JSON / CSV
// ---------------------------------------------------------------------------

inline SweepConfig sweep_config_from_json(const json& j, const std::string& path = "sweep") {
  cfg::only_keys(j, path, {"nu", "t_end", "dt", "cfl", "dt_max", "grid", "alpha", "initial_condition",
                           "output_stride", "output_interval", "enstrophy_p", "nu_list", "q_list", "p",
                           "euler_refinement_factor", "phi", "energy_tol"});
  SweepConfig c;
  apply_sim_keys(c.base, j, path);
  c.nu_list = cfg::at(j, path, "nu_list", cfg::numbers);
  if (j.contains("q_list")) c.q_list = cfg::numbers(j["q_list"], path + ".q_list");
  if (j.contains("p")) c.p = cfg::number(j["p"], path + ".p");
  if (j.contains("euler_refinement_factor")) {
    c.euler_refinement_factor = cfg::integer(j["euler_refinement_factor"], path + ".euler_refinement_factor");
  }
  if (j.contains("energy_tol")) c.energy_tol = cfg::number(j["energy_tol"], path + ".energy_tol");
  if (j.contains("phi")) {
    const auto& f = j["phi"];
    cfg::only_keys(f, path + ".phi", {"center", "radius", "amplitude"});
    if (f.contains("center")) c.phi.center = cfg::point(f["center"], path + ".phi.center");
    if (f.contains("radius")) c.phi.radius = cfg::number(f["radius"], path + ".phi.radius");
    if (f.contains("amplitude")) c.phi.amplitude = cfg::number(f["amplitude"], path + ".phi.amplitude");
  }
  try {
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

inline json to_json(const SweepConfig& c) {
  json j = to_json(c.base);
  j.erase("nu");
  j["nu_list"] = c.nu_list;
  j["q_list"] = c.q_list;
  j["p"] = c.p;
  j["euler_refinement_factor"] = c.euler_refinement_factor;
  j["energy_tol"] = c.energy_tol;
  j["phi"] = {{"center", {c.phi.center.x, c.phi.center.y}}, {"radius", c.phi.radius},
              {"amplitude", c.phi.amplitude}};
  return j;
}

inline json to_json(const RunMeta& m, bool deterministic) {
  return {{"n_r", m.n_r},       {"n_theta", m.n_theta}, {"steps", m.steps},
          {"dt_min", m.dt_min}, {"dt_last", m.dt_last}, {"wall_ms", deterministic ? 0.0 : m.wall_ms}};
}

/// Frozen column set: nu, q, sup_lq_diff, sup_lp_enstrophy, energy_ok, renorm_slack, wall_ms.
inline void write_sweep_csv(std::ostream& os, const ConvergenceReport& r, bool deterministic) {
  os.precision(17);
  os << "nu,q,sup_lq_diff,sup_lp_enstrophy,energy_ok,renorm_slack,wall_ms\n";
  for (const auto& row : r.rows) {
    os << row.nu << ',' << row.q << ',' << row.sup_lq_diff << ',' << row.sup_lp_enstrophy << ','
       << (row.energy_ok ? 1 : 0) << ',' << row.renorm_slack << ',' << (deterministic ? 0.0 : row.wall_ms)
       << '\n';
  }
}

inline json to_json(const ConvergenceReport& r, const SweepConfig& cfg, bool deterministic) {
  json j;
  j["euler_reference"] = to_json(r.euler, deterministic);
  j["euler_base"] = to_json(r.euler_base, deterministic);
  j["euler_sup_lp_enstrophy"] = r.euler_sup_lp;
  json per_q = json::array();
  for (std::size_t iq = 0; iq < cfg.q_list.size(); ++iq) {
    const double q = cfg.q_list[iq];
    const auto col = r.column(q, &SweepRow::sup_lq_diff);
    bool decreasing = true;
    for (std::size_t i = 1; i < col.size(); ++i) decreasing = decreasing && col[i] < col[i - 1];
    per_q.push_back({{"q", q},
                     {"self_convergence_floor", r.floor[iq]},
                     {"strictly_decreasing", decreasing},
                     {"last_over_first", col.front() > 0.0 ? col.back() / col.front() : 0.0}});
  }
  j["per_q"] = per_q;
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"nu", row.nu},
                    {"q", row.q},
                    {"sup_lq_diff", row.sup_lq_diff},
                    {"sup_lp_enstrophy", row.sup_lp_enstrophy},
                    {"energy_ok", row.energy_ok},
                    {"renorm_slack", row.renorm_slack},
                    {"above_floor", row.above_floor},
                    {"wall_ms", deterministic ? 0.0 : row.wall_ms}});
  }
  j["rows"] = rows;
  json runs = json::array();
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    auto m = to_json(r.runs[i], deterministic);
    m["nu"] = cfg.nu_list[i];
    runs.push_back(m);
  }
  j["runs"] = runs;
  const auto lp = r.column(cfg.q_list.front(), &SweepRow::sup_lp_enstrophy);
  j["sup_lp_enstrophy_relative_spread"] =
      (*std::max_element(lp.begin(), lp.end()) - *std::min_element(lp.begin(), lp.end())) / lp.front();
  j["renorm_constant"] = r.renorm_constant;
  return j;
}

}  // namespace navslip
