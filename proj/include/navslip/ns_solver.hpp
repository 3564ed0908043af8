#pragma once

/// \file ns_solver.hpp
/// \brief Vorticity / stream-function time stepping with the Navier-slip wall
/// condition imposed as Dirichlet data for the vorticity.
///
/// One step is Heun's method for advection with Crank-Nicolson diffusion per
/// Fourier mode. Stage 1 uses the wall value from psi^n, stage 2 the one from
/// the predicted psi. For nu = 0 the diffusion solves drop out and no wall
/// data is imposed.

#include "navslip/biot_savart.hpp"
#include "navslip/field.hpp"
#include "navslip/geometry.hpp"
#include "navslip/radial.hpp"
#include "navslip/spectral.hpp"
#include "navslip/wall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace navslip {

struct InitialCondition {
  enum class Kind { Const, Bump, Singular, Modes };
  struct Mode {
    int k = 0;
    /// omega contribution r^k (c0 + c1 r + c2 r^2 + ...) cos(k theta)
    std::vector<double> coeffs;
  };

  Kind kind = Kind::Const;
  double value = 0.0;
  Vec2 center{0.0, 0.0};
  double radius = 0.5;
  double amplitude = 1.0;
  double gamma = 0.5;
  double p = 2.0;
  std::vector<Mode> modes;

  static InitialCondition constant(double c) {
    InitialCondition ic;
    ic.value = c;
    return ic;
  }
  static InitialCondition bump(Vec2 center, double radius, double amplitude) {
    InitialCondition ic;
    ic.kind = Kind::Bump;
    ic.center = center;
    ic.radius = radius;
    ic.amplitude = amplitude;
    return ic;
  }
  static InitialCondition singular(Vec2 center, double gamma, double p) {
    InitialCondition ic;
    ic.kind = Kind::Singular;
    ic.center = center;
    ic.gamma = gamma;
    ic.p = p;
    return ic;
  }

  void validate() const {
    switch (kind) {
      case Kind::Const:
        if (!std::isfinite(value)) throw std::invalid_argument("initial_condition: non-finite const");
        break;
      case Kind::Bump:
        if (!(radius > 0.0)) throw std::invalid_argument("initial_condition.bump: radius must be > 0");
        if (!std::isfinite(amplitude)) {
          throw std::invalid_argument("initial_condition.bump: non-finite amplitude");
        }
        break;
      case Kind::Singular:
        if (!(gamma > 0.0)) throw std::invalid_argument("initial_condition.singular: gamma must be > 0");
        if (!(gamma * p < 2.0)) {
          throw std::invalid_argument("initial_condition.singular: need gamma * p < 2");
        }
        break;
      case Kind::Modes:
        for (const auto& m : modes) {
          if (m.k < 0) throw std::invalid_argument("initial_condition.modes: negative k");
        }
        break;
    }
  }

  double bump_value(double x, double y) const {
    const double d2 = ((x - center.x) * (x - center.x) + (y - center.y) * (y - center.y)) /
                      (radius * radius);
    if (d2 >= 1.0) return 0.0;
    return amplitude * std::exp(1.0 - 1.0 / (1.0 - d2));
  }

  ScalarField sample(const PolarGrid& g) const {
    validate();
    const double cap = std::pow(g.dr(), -gamma);
    return ScalarField::from_function(g, [&](double r, double th) {
      const double x = r * std::cos(th), y = r * std::sin(th);
      switch (kind) {
        case Kind::Const:
          return value;
        case Kind::Bump:
          return bump_value(x, y);
        case Kind::Singular: {
          const double d = std::hypot(x - center.x, y - center.y);
          return d == 0.0 ? cap : std::min(cap, std::pow(d, -gamma));
        }
        case Kind::Modes: {
          double acc = 0.0;
          for (const auto& m : modes) {
            double poly = 0.0;
            for (std::size_t i = m.coeffs.size(); i-- > 0;) poly = poly * r + m.coeffs[i];
            acc += std::pow(r, m.k) * poly * std::cos(m.k * th);
          }
          return acc;
        }
      }
      return 0.0;
    });
  }
};

struct SimConfig {
  double nu = 0.0;
  double t_end = 1.0;
  /// Fixed step; empty means automatic from the CFL bound.
  std::optional<double> dt;
  double cfl = 0.4;
  /// Upper bound on automatic steps.
  double dt_max = 0.01;
  int n_r = 64;
  int n_theta = 64;
  AlphaSpec alpha = AlphaSpec::constant(0.0);
  InitialCondition initial = InitialCondition::constant(0.0);
  /// Snapshot every output_stride steps (0 disables).
  int output_stride = 100;
  /// Snapshot at multiples of this time, steps shortened to land on them (0 disables).
  double output_interval = 0.0;
  std::vector<double> enstrophy_p{2.0, 4.0};

  void validate() const {
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw std::invalid_argument("config: nu must be >= 0");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("config: t_end must be > 0");
    if (dt && !(*dt > 0.0)) throw std::invalid_argument("config: dt must be > 0 or \"auto\"");
    if (!(cfl > 0.0 && cfl <= 0.5)) throw std::invalid_argument("config: cfl must be in (0, 0.5]");
    if (!(dt_max > 0.0)) throw std::invalid_argument("config: dt_max must be > 0");
    if (output_stride < 0) throw std::invalid_argument("config: output_stride must be >= 0");
    if (!(output_interval >= 0.0)) throw std::invalid_argument("config: output_interval must be >= 0");
    for (double p : enstrophy_p) {
      if (!(p >= 1.0)) throw std::invalid_argument("config: enstrophy exponents must be >= 1");
    }
    PolarGrid(n_r, n_theta);
    initial.validate();
  }
};

/// Advective CFL constant that no step may exceed.
inline constexpr double kCflLimit = 0.5;

class CflViolation : public std::runtime_error {
 public:
  CflViolation(double max_u, double dt, double limit)
      : std::runtime_error(message(max_u, dt, limit)), max_u(max_u), dt(dt) {}
  double max_u;
  double dt;

 private:
  static std::string message(double max_u, double dt, double limit) {
    std::ostringstream os;
    os << "CFL violation: dt=" << dt << " exceeds " << limit << " at max|u|=" << max_u;
    return os.str();
  }
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(long step, double t)
      : std::runtime_error("non-finite values at step " + std::to_string(step) +
                           " (t=" + std::to_string(t) + ")"),
        step(step),
        t(t) {}
  long step;
  double t;
};

/// Any step failure, tagged with the time at which it happened.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, double t)
      : std::runtime_error(what + " [t=" + std::to_string(t) + "]"), t(t) {}
  double t;
};

struct FlowState {
  double t = 0.0;
  ScalarField omega;
  ScalarField psi;
  VectorField u;
  /// Vorticity wall data from the current psi.
  std::vector<double> wall;
};

struct Snapshot {
  double t;
  ScalarField omega;
  ScalarField psi;
  VectorField u;
  std::vector<double> wall_ut;
};

struct SeriesRow {
  double t;
  double dt;
  double energy;
  std::vector<double> enstrophy;
  double bc_residual;
};

struct Trajectory {
  SimConfig config;
  std::vector<Snapshot> snapshots;
  std::vector<SeriesRow> series;
  long steps = 0;
  double dt_min = 0.0;
  double dt_last = 0.0;

  const Snapshot& at_time(double t, double tol = 1e-9) const {
    for (const auto& s : snapshots) {
      if (std::abs(s.t - t) <= tol) return s;
    }
    throw std::out_of_range("trajectory: no snapshot at t=" + std::to_string(t));
  }
};

class NsSolver {
 public:
  explicit NsSolver(const SimConfig& cfg)
      : cfg_((cfg.validate(), cfg)),
        grid_(cfg.n_r, cfg.n_theta),
        trace_(boundary_trace(grid_, cfg.alpha)),
        poisson_(grid_) {}

  const PolarGrid& grid() const { return grid_; }
  const BoundaryTrace& trace() const { return trace_; }
  const SimConfig& config() const { return cfg_; }

  FlowState initial_state() const { return state_from(cfg_.initial.sample(grid_), 0.0); }

  FlowState state_from(ScalarField omega, double t) const {
    auto psi = poisson_.solve(omega);
    auto u = perp_grad(psi);
    auto wall = vorticity_boundary(psi, trace_);
    // The scheme imposes the wall value from the first step on.
    if (cfg_.nu > 0.0) omega.boundary = wall;
    return {t, std::move(omega), std::move(psi), std::move(u), std::move(wall)};
  }

  /// Largest step the CFL bound allows with constant c.
  double cfl_dt(const VectorField& u, double c) const {
    const double m = max_speed(u);
    const double h = grid_.min_spacing();
    return m > 0.0 ? c * h / m : std::numeric_limits<double>::infinity();
  }

  double auto_dt(const VectorField& u) const { return std::min(cfl_dt(u, cfg_.cfl), cfg_.dt_max); }

  /// Advances s by dt. Throws CflViolation or DivergenceError.
  void step(FlowState& s, double dt, long index = 0) const {
    if (dt > cfl_dt(s.u, kCflLimit) * (1.0 + 1e-12)) {
      throw CflViolation(max_speed(s.u), dt, kCflLimit * grid_.min_spacing());
    }
    const double a = 0.5 * cfg_.nu * dt;
    const auto w_n = to_modes(grid_, s.omega.values);
    const auto n_n = advection(s.omega, s.u);
    const auto g_n = ring_forward(s.wall);

    // Stage 1: predictor.
    ModeField forcing(grid_.n_r(), grid_.n_modes());
    for (std::size_t i = 0; i < forcing.data().size(); ++i) forcing.data()[i] = dt * n_n.data()[i];
    auto w1 = diffuse(w_n, g_n, g_n, forcing, a);
    FlowState st = from_modes_state(w1, s.t + dt, index);
    if (cfg_.nu > 0.0) st.omega.boundary = s.wall;

    // Stage 2: corrector with the stage-lagged wall value.
    const auto n_1 = advection(st.omega, st.u);
    const auto g_1 = ring_forward(st.wall);
    for (std::size_t i = 0; i < forcing.data().size(); ++i) {
      forcing.data()[i] = 0.5 * dt * (n_n.data()[i] + n_1.data()[i]);
    }
    auto w2 = diffuse(w_n, g_n, g_1, forcing, a);
    FlowState next = from_modes_state(w2, s.t + dt, index);
    if (cfg_.nu > 0.0) next.omega.boundary = st.wall;
    s = std::move(next);
  }

 private:
  ModeField advection(const ScalarField& w, const VectorField& u) const {
    const auto dr = radial_derivative(grid_, w.values, Parity::Scalar);
    const auto dth = angular_derivative(grid_, w.values);
    std::vector<double> n(grid_.size());
    for (int j = 0; j < grid_.n_r(); ++j) {
      for (int k = 0; k < grid_.n_theta(); ++k) {
        const auto i = grid_.index(j, k);
        n[i] = -(u.ur[i] * dr[i] + u.ut[i] * dth[i] / grid_.r(j));
      }
    }
    auto m = to_modes(grid_, n);
    dealias(m, grid_.n_theta());
    pole_filter(m);
    return m;
  }

  // (I - a L) w = (I + a L) w_n + wall terms + forcing, per mode.
  ModeField diffuse(const ModeField& w_n, const std::vector<cplx>& g_expl,
                    const std::vector<cplx>& g_impl, const ModeField& forcing, double a) const {
    const auto& op = poisson_.radial();
    const int nr = grid_.n_r();
    ModeField out(nr, grid_.n_modes());
    std::vector<cplx> col(nr);
    for (int k = 0; k < grid_.n_modes(); ++k) {
      for (int j = 0; j < nr; ++j) col[j] = w_n(j, k);
      if (a > 0.0) {
        const auto lw = op.apply<cplx>(k, col, g_expl[k]);
        for (int j = 0; j < nr; ++j) col[j] += a * lw[j] + forcing(j, k);
        col[nr - 1] += a * op.boundary_coefficient() * g_impl[k];
        op.solve_shifted<cplx>(k, 1.0, a, col);
      } else {
        for (int j = 0; j < nr; ++j) col[j] += forcing(j, k);
      }
      for (int j = 0; j < nr; ++j) out(j, k) = col[j];
    }
    return out;
  }

  FlowState from_modes_state(const ModeField& w, double t, long index) const {
    ScalarField omega(grid_, from_modes(grid_, w));
    if (!omega.all_finite()) throw DivergenceError(index, t);
    auto psi = poisson_.solve_from_modes(w);
    auto u = perp_grad(psi);
    if (!psi.all_finite() || !u.all_finite()) throw DivergenceError(index, t);
    auto wall = vorticity_boundary(psi, trace_);
    return {t, std::move(omega), std::move(psi), std::move(u), std::move(wall)};
  }

  SimConfig cfg_;
  PolarGrid grid_;
  BoundaryTrace trace_;
  PoissonDirichletSolver poisson_;
};

/// One step of the scheme from (omega, psi); returns (omega', psi').
inline std::pair<ScalarField, ScalarField> step(const ScalarField& omega, const ScalarField& psi,
                                                const SimConfig& config, double dt) {
  NsSolver solver(config);
  FlowState s{0.0, omega, psi, perp_grad(psi), vorticity_boundary(psi, solver.trace())};
  solver.step(s, dt);
  return {std::move(s.omega), std::move(s.psi)};
}

namespace detail {
inline SeriesRow series_row(const NsSolver& solver, const FlowState& s, double dt) {
  SeriesRow row;
  row.t = s.t;
  row.dt = dt;
  const double e = lp_norm(s.u, 2.0);
  row.energy = e * e;
  for (double p : solver.config().enstrophy_p) row.enstrophy.push_back(lp_norm(s.omega, p));
  row.bc_residual = navier_residuals(s.u, s.omega, solver.trace()).navier.max_abs;
  return row;
}

inline Snapshot snapshot(const FlowState& s) {
  return {s.t, s.omega, s.psi, s.u, s.u.ut_boundary.value_or(std::vector<double>{})};
}
}  // namespace detail

/// Runs the configured simulation. Step errors surface as SimulationError
/// carrying the failing time.
inline Trajectory simulate(const SimConfig& config) {
  NsSolver solver(config);
  Trajectory traj;
  traj.config = config;
  FlowState s = solver.initial_state();
  traj.series.push_back(detail::series_row(solver, s, 0.0));
  traj.snapshots.push_back(detail::snapshot(s));

  const double t_end = config.t_end;
  const double eps = 1e-12 * t_end;
  double dt_nominal = config.dt ? *config.dt : solver.auto_dt(s.u);
  long n_out = 1;
  auto out_time = [&](long n) {
    return config.output_interval > 0.0 ? std::min(n * config.output_interval, t_end) : t_end;
  };
  double next_out = out_time(n_out);
  long since_dt = 0;
  traj.dt_min = std::numeric_limits<double>::infinity();
  while (s.t < t_end - eps) {
    if (!config.dt) {
      const bool violates = dt_nominal > solver.cfl_dt(s.u, kCflLimit);
      if (since_dt >= 10 || violates) {
        dt_nominal = solver.auto_dt(s.u);
        since_dt = 0;
      }
    }
    double target = std::min(next_out, t_end);
    double dt = dt_nominal;
    bool lands = false;
    if (s.t + dt >= target - eps) {
      dt = target - s.t;
      lands = true;
    }
    try {
      solver.step(s, dt, traj.steps + 1);
    } catch (const std::exception& e) {
      throw SimulationError(e.what(), s.t);
    }
    if (lands) s.t = target;  // avoid drift in the landing time
    ++traj.steps;
    ++since_dt;
    traj.dt_min = std::min(traj.dt_min, dt);
    traj.dt_last = dt;
    traj.series.push_back(detail::series_row(solver, s, dt));
    const bool at_interval = lands && config.output_interval > 0.0;
    const bool at_stride = config.output_stride > 0 && traj.steps % config.output_stride == 0;
    const bool at_end = s.t >= t_end - eps;
    if (at_interval || at_stride || at_end) traj.snapshots.push_back(detail::snapshot(s));
    if (lands) next_out = out_time(++n_out);
  }
  return traj;
}

}  // namespace navslip
