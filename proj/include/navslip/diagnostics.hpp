#pragma once

/// \file diagnostics.hpp
/// \brief Residuals of the weak formulation and the energy-type balances,
/// evaluated on trajectories.
///
/// Time derivatives are centred differences on the snapshot times (one-sided
/// at the ends); time integrals use the trapezoid rule on the same times.

#include "navslip/field.hpp"
#include "navslip/geometry.hpp"
#include "navslip/ns_solver.hpp"
#include "navslip/numerics.hpp"
#include "navslip/pressure.hpp"
#include "navslip/wall.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace navslip {

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> values;
  double max_abs = 0.0;
  double mean_abs = 0.0;

  void finish() {
    max_abs = 0.0;
    mean_abs = 0.0;
    for (double v : values) {
      max_abs = std::max(max_abs, std::abs(v));
      mean_abs += std::abs(v);
    }
    if (!values.empty()) mean_abs /= static_cast<double>(values.size());
  }
};

namespace detail {
inline std::vector<double> time_derivative(const std::vector<double>& t, const std::vector<double>& a) {
  const std::size_t n = t.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  if (n == 2) {
    d[0] = d[1] = (a[1] - a[0]) / (t[1] - t[0]);
    return d;
  }
  // Second-order one-sided at the ends.
  auto one_sided = [&](std::size_t i0, std::size_t at) {
    const double nodes[] = {t[i0], t[i0 + 1], t[i0 + 2]};
    const auto w = fd_weights(nodes, t[at], 1);
    return w[0] * a[i0] + w[1] * a[i0 + 1] + w[2] * a[i0 + 2];
  };
  d.front() = one_sided(0, 0);
  d.back() = one_sided(n - 3, n - 1);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (a[i + 1] - a[i - 1]) / (t[i + 1] - t[i - 1]);
  return d;
}

inline double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) acc += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
  return acc;
}

/// Cartesian velocity gradient: g[a][b] = d_b u_a.
struct CartesianGradient {
  ScalarField ux, uy;
  std::array<std::array<ScalarField, 2>, 2> d;
};

inline CartesianGradient cartesian_gradient(const VectorField& u) {
  auto [ux, uy] = to_cartesian(u);
  auto [a, b] = gradient(ux);
  auto [c, e] = gradient(uy);
  return {std::move(ux), std::move(uy),
          {{{std::move(a), std::move(b)}, {std::move(c), std::move(e)}}}};
}

inline void require_admissible(const VectorField& v, double tol) {
  const double scale = std::max(1.0, gradient_lp_norm(v, 2.0));
  const double div = lp_norm(divergence(v), 2.0);
  if (div > tol * scale) {
    throw std::invalid_argument("test field not divergence-free: |div v|_2=" + std::to_string(div));
  }
  const auto vn = boundary_value(v.grid, v.ur, v.ur_boundary ? &*v.ur_boundary : nullptr);
  if (max_abs(vn) > tol * std::max(1.0, max_speed(v))) {
    throw std::invalid_argument("test field not tangent: max|v.n|=" + std::to_string(max_abs(vn)));
  }
}
}  // namespace detail

/// |d/dt (u,v) + ((u.grad)u, v) + nu (grad u, grad v) - nu <(kappa - alpha) u, v>|
/// at every snapshot.
inline TimeSeries weak_form_residual(const Trajectory& traj, const VectorField& v, double nu,
                                     const BoundaryTrace& trace, double admissibility_tol = 1e-6) {
  detail::require_admissible(v, admissibility_tol);
  const auto& g = v.grid;
  const auto gv = detail::cartesian_gradient(v);
  const auto vb_t = boundary_value(g, v.ut, v.ut_boundary ? &*v.ut_boundary : nullptr);
  TimeSeries out;
  std::vector<double> pairing, rest;
  for (const auto& snap : traj.snapshots) {
    require_same_grid(g, snap.u.grid);
    const auto gu = detail::cartesian_gradient(snap.u);
    std::vector<double> uv(g.size()), conv(g.size()), visc(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double ux = gu.ux.values[i], uy = gu.uy.values[i];
      const double vx = gv.ux.values[i], vy = gv.uy.values[i];
      uv[i] = ux * vx + uy * vy;
      const double cx = ux * gu.d[0][0].values[i] + uy * gu.d[0][1].values[i];
      const double cy = ux * gu.d[1][0].values[i] + uy * gu.d[1][1].values[i];
      conv[i] = cx * vx + cy * vy;
      double s = 0.0;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) s += gu.d[a][b].values[i] * gv.d[a][b].values[i];
      }
      visc[i] = s;
    }
    const auto ub_t = boundary_value(g, snap.u.ut, snap.u.ut_boundary ? &*snap.u.ut_boundary : nullptr);
    std::vector<double> wall(g.n_theta());
    for (int k = 0; k < g.n_theta(); ++k) {
      wall[k] = (trace.kappa[k] - trace.alpha[k]) * ub_t[k] * vb_t[k];
    }
    out.t.push_back(snap.t);
    pairing.push_back(integrate(g, uv));
    rest.push_back(integrate(g, conv) + nu * integrate(g, visc) - nu * integrate_boundary(g, wall));
  }
  const auto dt_pair = detail::time_derivative(out.t, pairing);
  for (std::size_t i = 0; i < out.t.size(); ++i) out.values.push_back(dt_pair[i] + rest[i]);
  out.finish();
  return out;
}

/// tau_bar = eta(r) (2 kappa - alpha(theta)) e_theta, eta the C^2 quintic step
/// from 0 at r = 1/2 to 1 at r = 1 (or identically zero).
struct ExtendedTangent {
  VectorField field;
  bool zero_cutoff = false;

  static double eta(double r) {
    if (r <= 0.5) return 0.0;
    if (r >= 1.0) return 1.0;
    const double s = 2.0 * (r - 0.5);
    return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
  }

  static ExtendedTangent build(const PolarGrid& g, const AlphaSpec& alpha, bool zero_cutoff = false) {
    auto f = [&](double r, double th) {
      const double c = zero_cutoff ? 0.0 : eta(r) * (2.0 - alpha(th));
      return std::pair{0.0, c};
    };
    return {VectorField::from_polar(g, f, true), zero_cutoff};
  }
};

struct BalanceReport {
  std::vector<double> t_start;
  std::vector<double> defect;  ///< per interval
  double max_abs = 0.0;
  /// Size of the largest single term, for relative reading.
  double scale = 0.0;
};

/// Per interval: 1/2 [|wbar|^2] + int (nu |grad wbar|^2 - (f, wbar)) dt with
/// wbar = omega - u.tau_bar.
inline BalanceReport enstrophy_balance_residual(const Trajectory& traj, const ExtendedTangent& tau,
                                                double nu, const std::vector<ScalarField>& pressures) {
  if (pressures.size() != traj.snapshots.size()) {
    throw std::invalid_argument("enstrophy_balance_residual: missing pressure snapshot (" +
                                std::to_string(pressures.size()) + " for " +
                                std::to_string(traj.snapshots.size()) + " snapshots)");
  }
  const auto& g = tau.field.grid;
  const auto gt = detail::cartesian_gradient(tau.field);
  ScalarField lx = laplacian(gt.ux), ly = laplacian(gt.uy);
  std::vector<double> times, half_norm, dissip, source;
  for (std::size_t n = 0; n < traj.snapshots.size(); ++n) {
    const auto& snap = traj.snapshots[n];
    require_same_grid(g, snap.u.grid);
    const auto gu = detail::cartesian_gradient(snap.u);
    const auto [px, py] = gradient(pressures[n]);
    ScalarField wbar(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      wbar.values[i] = snap.omega.values[i] - (gu.ux.values[i] * gt.ux.values[i] +
                                               gu.uy.values[i] * gt.uy.values[i]);
    }
    if (snap.omega.boundary && snap.u.ut_boundary) {
      std::vector<double> b(g.n_theta());
      for (int k = 0; k < g.n_theta(); ++k) {
        b[k] = (*snap.omega.boundary)[k] - (*snap.u.ut_boundary)[k] * (*tau.field.ut_boundary)[k];
      }
      wbar.boundary = std::move(b);
    }
    const auto [wx, wy] = gradient(wbar);
    std::vector<double> w2(g.size()), gw2(g.size()), fw(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double u[2] = {gu.ux.values[i], gu.uy.values[i]};
      const double tb[2] = {gt.ux.values[i], gt.uy.values[i]};
      double f = px.values[i] * tb[0] + py.values[i] * tb[1];
      f += nu * (u[0] * lx.values[i] + u[1] * ly.values[i]);
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          // d_a tau_b = gt.d[b][a]
          f -= u[a] * u[b] * gt.d[b][a].values[i];
          f += 2.0 * nu * gu.d[b][a].values[i] * gt.d[b][a].values[i];
        }
      }
      w2[i] = wbar.values[i] * wbar.values[i];
      gw2[i] = wx.values[i] * wx.values[i] + wy.values[i] * wy.values[i];
      fw[i] = f * wbar.values[i];
    }
    times.push_back(snap.t);
    half_norm.push_back(0.5 * integrate(g, w2));
    dissip.push_back(nu * integrate(g, gw2));
    source.push_back(integrate(g, fw));
  }
  BalanceReport rep;
  for (std::size_t n = 0; n + 1 < times.size(); ++n) {
    const double dt = times[n + 1] - times[n];
    const double d = half_norm[n + 1] - half_norm[n] +
                     0.5 * dt * (dissip[n] + dissip[n + 1] - source[n] - source[n + 1]);
    rep.t_start.push_back(times[n]);
    rep.defect.push_back(d);
    rep.max_abs = std::max(rep.max_abs, std::abs(d));
    rep.scale = std::max({rep.scale, std::abs(half_norm[n + 1] - half_norm[n]),
                          0.5 * dt * (std::abs(dissip[n]) + std::abs(source[n]))});
  }
  return rep;
}

/// Pressure at every snapshot of a trajectory.
inline std::vector<ScalarField> trajectory_pressures(const Trajectory& traj, const BoundaryTrace& trace,
                                                     const PressureOptions& opt = {}) {
  std::vector<ScalarField> out;
  out.reserve(traj.snapshots.size());
  for (const auto& s : traj.snapshots) {
    out.push_back(recover_pressure(s.u, s.omega, traj.config.nu, trace, opt).p);
  }
  return out;
}

/// Spatial factor of the built-in test functions phi = (1 - t/T)_+ bump(x).
struct PhiSpec {
  Vec2 center{0.0, 0.0};
  double radius = 0.5;
  double amplitude = 1.0;

  void validate() const {
    if (!(radius > 0.0)) throw std::invalid_argument("phi: radius must be > 0");
    if (std::hypot(center.x, center.y) + radius >= 1.0) {
      throw std::invalid_argument("phi: support must stay inside the disk");
    }
    if (amplitude < 0.0) throw std::invalid_argument("phi: negative sample (amplitude < 0)");
  }
  double value(double x, double y) const {
    return InitialCondition::bump(center, radius, amplitude).bump_value(x, y);
  }
};

struct RenormalizedSlack {
  double s = 0.0;       ///< S(nu)
  double transport = 0.0;
  double initial = 0.0;
  /// max(0, -S) / nu, the measured constant (0 when nu = 0).
  double constant = 0.0;
};

/// S = int_0^T int |omega|^q (d_t phi + u.grad phi) dx dt + int |omega_0|^q phi(0) dx.
inline RenormalizedSlack renormalized_slack(const Trajectory& traj, const PhiSpec& phi, double q,
                                            double nu, double p) {
  phi.validate();
  if (!(q >= 1.0 && q < p)) {
    throw std::invalid_argument("renormalized_slack: need 1 <= q < p");
  }
  if (traj.snapshots.empty()) throw std::invalid_argument("renormalized_slack: empty trajectory");
  const auto& g = traj.snapshots.front().omega.grid;
  const double t_end = traj.snapshots.back().t;
  const auto bump = ScalarField::from_function(g, [&](double r, double th) {
    return phi.value(r * std::cos(th), r * std::sin(th));
  });
  for (double v : bump.values) {
    if (v < 0.0) throw std::invalid_argument("renormalized_slack: negative phi sample");
  }
  const auto [bx, by] = gradient(bump);
  std::vector<double> times, integrand;
  for (const auto& snap : traj.snapshots) {
    const double ramp = std::max(0.0, 1.0 - snap.t / t_end);
    const auto [ux, uy] = to_cartesian(snap.u);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double dphi = -bump.values[i] / t_end +
                          ramp * (ux.values[i] * bx.values[i] + uy.values[i] * by.values[i]);
      f[i] = std::pow(std::abs(snap.omega.values[i]), q) * dphi;
    }
    times.push_back(snap.t);
    integrand.push_back(integrate(g, f));
  }
  RenormalizedSlack r;
  r.transport = detail::trapezoid(times, integrand);
  std::vector<double> init(g.size());
  const auto& w0 = traj.snapshots.front().omega;
  for (std::size_t i = 0; i < g.size(); ++i) init[i] = std::pow(std::abs(w0.values[i]), q) * bump.values[i];
  r.initial = integrate(g, init);
  r.s = r.transport + r.initial;
  r.constant = nu > 0.0 ? std::max(0.0, -r.s) / nu : 0.0;
  return r;
}

/// |u|_{H^2} / (|Delta u|_2 + |u|_2) with Delta u = perp_grad(curl u).
inline double h2_ratio(const VectorField& u) {
  const auto& g = u.grid;
  const auto gu = detail::cartesian_gradient(u);
  double second = 0.0;
  std::vector<std::span<const double>> first;
  std::vector<ScalarField> hess;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      first.emplace_back(gu.d[a][b].values);
      auto [h0, h1] = gradient(gu.d[a][b]);
      hess.push_back(std::move(h0));
      hess.push_back(std::move(h1));
    }
  }
  std::vector<std::span<const double>> hs;
  for (const auto& h : hess) hs.emplace_back(h.values);
  second = lp_norm_components(g, hs, 2.0);
  const double l2 = lp_norm(u, 2.0);
  const double grad = lp_norm_components(g, first, 2.0);
  const auto w = curl(u);
  const auto [wx, wy] = gradient(w);
  std::span<const double> lap[] = {wy.values, wx.values};  // (-d_y w, d_x w) up to sign
  const double lap_norm = lp_norm_components(g, lap, 2.0);
  const double denom = lap_norm + l2;
  if (denom < 1e-14) throw std::invalid_argument("h2_ratio: zero field");
  return std::sqrt(l2 * l2 + grad * grad + second * second) / denom;
}

}  // namespace navslip
