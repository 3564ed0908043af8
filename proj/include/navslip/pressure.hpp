#pragma once

/// \file pressure.hpp
/// \brief Pressure from a velocity snapshot: div(grad p + (u.grad)u) = 0 with
/// the wall flux (grad p + (u.grad)u).n = nu (Delta u).n = -nu d_theta omega.
///
/// The radial part is discretized in flux form, so summing the mode-0 rows
/// telescopes to the wall flux: the Neumann data is compatible exactly when
/// its angular mean vanishes. The mean is projected out and reported.

#include "navslip/field.hpp"
#include "navslip/geometry.hpp"
#include "navslip/numerics.hpp"
#include "navslip/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace navslip {

struct PressureSolve {
  ScalarField p;
  /// Max nodal residual of the discrete flux equations.
  double poisson_residual = 0.0;
  /// Max over angles of |d_r p + N.n - nu (Delta u).n| at r = 1, one-sided.
  double neumann_residual = 0.0;
  /// |angular mean of the Neumann data| before projection.
  double compatibility_defect = 0.0;
  double mean = 0.0;
};

struct PressureOptions {
  double compatibility_tol = 1e-6;
  double admissibility_tol = 1e-6;
  /// Constant added to the Neumann data (gauge checks).
  double data_shift = 0.0;
};

class PressureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Convective term (u.grad)u in polar components.
inline std::pair<std::vector<double>, std::vector<double>> convective_term(const VectorField& u) {
  const auto& g = u.grid;
  const auto [ux, uy] = to_cartesian(u);
  const auto [uxx, uxy] = gradient(ux);
  const auto [uyx, uyy] = gradient(uy);
  std::vector<double> nr(g.size()), nt(g.size());
  for (int j = 0; j < g.n_r(); ++j) {
    for (int k = 0; k < g.n_theta(); ++k) {
      const auto i = g.index(j, k);
      const double vx = ux.values[i], vy = uy.values[i];
      const double nx = vx * uxx.values[i] + vy * uxy.values[i];
      const double ny = vx * uyx.values[i] + vy * uyy.values[i];
      const double c = std::cos(g.theta(k)), s = std::sin(g.theta(k));
      nr[i] = nx * c + ny * s;
      nt[i] = -nx * s + ny * c;
    }
  }
  return {std::move(nr), std::move(nt)};
}

inline PressureSolve recover_pressure(const VectorField& u, const ScalarField& omega, double nu,
                                      const BoundaryTrace& trace, const PressureOptions& opt = {}) {
  require_same_grid(u.grid, omega.grid);
  const auto& g = u.grid;
  if (trace.size() != static_cast<std::size_t>(g.n_theta())) {
    throw std::invalid_argument("recover_pressure: trace size mismatch");
  }
  if (!u.all_finite() || !omega.all_finite()) {
    throw std::invalid_argument("recover_pressure: non-finite input");
  }
  const double grad_scale = std::max(1.0, gradient_lp_norm(u, 2.0));
  const double div = lp_norm(divergence(u), 2.0);
  if (div > opt.admissibility_tol * grad_scale) {
    throw std::invalid_argument("recover_pressure: u not divergence-free (|div u|_2=" +
                                std::to_string(div) + ")");
  }
  const auto un = boundary_value(g, u.ur, u.ur_boundary ? &*u.ur_boundary : nullptr);
  const double speed = std::max(1.0, max_speed(u));
  if (max_abs(un) > opt.admissibility_tol * speed) {
    throw std::invalid_argument("recover_pressure: u not tangent (max|u.n|=" +
                                std::to_string(max_abs(un)) + ")");
  }

  const int nr = g.n_r(), nt = g.n_theta(), nm = g.n_modes();
  const double h = g.dr();
  const auto [cr, ct] = convective_term(u);

  // Wall flux data nu (Delta u).n = -nu d_theta omega(1, .).
  auto wb = boundary_value(g, omega.values, omega.boundary ? &*omega.boundary : nullptr);
  auto data = ring_angular_derivative(wb);
  for (double& v : data) v = -nu * v + opt.data_shift;
  double mean = 0.0;
  for (double v : data) mean += v;
  mean /= nt;
  PressureSolve out{ScalarField(g)};
  out.compatibility_defect = std::abs(mean);
  if (out.compatibility_defect > opt.compatibility_tol) {
    throw PressureError("recover_pressure: Neumann data incompatible, defect " +
                        std::to_string(out.compatibility_defect));
  }
  for (double& v : data) v -= mean;

  const auto nr_hat = to_modes(g, cr);
  const auto nt_hat = to_modes(g, ct);
  const auto b_hat = ring_forward(data);
  auto rface = [&](int j) { return g.r(j) + 0.5 * h; };  // face j + 1/2

  ModeField p_hat(nr, nm);
  std::vector<double> lo(nr), di(nr), up(nr);
  std::vector<cplx> rhs(nr);
  ModeField res_hat(nr, nm);
  for (int k = 0; k < nm; ++k) {
    const double kk = static_cast<double>(k) * k;
    const cplx ik = (k == nt / 2) ? cplx(0.0) : cplx(0.0, k);
    for (int j = 0; j < nr; ++j) {
      const double rj = g.r(j);
      const double rp = j + 1 < nr ? rface(j) : 0.0;
      const double rm = j > 0 ? rface(j - 1) : 0.0;
      lo[j] = rm / (rj * h * h);
      up[j] = rp / (rj * h * h);
      di[j] = -(lo[j] + up[j]) - kk / (rj * rj);
      const cplx fp = j + 1 < nr ? rp * 0.5 * (nr_hat(j, k) + nr_hat(j + 1, k)) : b_hat[k];
      const cplx fm = j > 0 ? rm * 0.5 * (nr_hat(j - 1, k) + nr_hat(j, k)) : cplx(0.0);
      rhs[j] = -(fp - fm) / (rj * h) - ik * nt_hat(j, k) / rj;
    }
    const auto rhs_full = rhs;
    if (k == 0) {
      // The flux system determines p up to a constant; pin the wall node.
      lo[nr - 1] = 0.0;
      di[nr - 1] = 1.0;
      rhs[nr - 1] = 0.0;
    }
    solve_tridiagonal<cplx>(lo, di, up, rhs);
    for (int j = 0; j < nr; ++j) p_hat(j, k) = rhs[j];
    // Residual of the unpinned equations.
    for (int j = 0; j < nr; ++j) {
      const double rj = g.r(j);
      const double l = j > 0 ? rface(j - 1) / (rj * h * h) : 0.0;
      const double uu = j + 1 < nr ? rface(j) / (rj * h * h) : 0.0;
      cplx ap = (-(l + uu) - kk / (rj * rj)) * rhs[j];
      if (j > 0) ap += l * rhs[j - 1];
      if (j + 1 < nr) ap += uu * rhs[j + 1];
      res_hat(j, k) = ap - rhs_full[j];
    }
  }
  out.p = ScalarField(g, from_modes(g, p_hat));
  const double m = integrate(g, out.p.values) / kPi;
  for (double& v : out.p.values) v -= m;
  out.mean = integrate(g, out.p.values) / kPi;
  out.poisson_residual = max_abs(from_modes(g, res_hat));

  const auto dpr = boundary_radial_derivative(g, out.p.values, nullptr);
  const auto cnr = boundary_value(g, cr, nullptr);
  double nres = 0.0;
  for (int k = 0; k < nt; ++k) nres = std::max(nres, std::abs(dpr[k] + cnr[k] - data[k]));
  out.neumann_residual = nres;
  return out;
}

struct PressureSlack {
  double lhs;    ///< |grad p|_2
  double rhs;    ///< |(u.grad)u|_2 + nu |grad omega|_2
  double slack;  ///< rhs - lhs
};

inline PressureSlack pressure_estimate(const ScalarField& p, const VectorField& u,
                                       const ScalarField& omega, double nu) {
  require_same_grid(p.grid, u.grid);
  require_same_grid(p.grid, omega.grid);
  const auto [px, py] = gradient(p);
  std::span<const double> gp[] = {px.values, py.values};
  const auto [cr, ct] = convective_term(u);
  std::span<const double> cn[] = {cr, ct};
  const auto [wx, wy] = gradient(omega);
  std::span<const double> gw[] = {wx.values, wy.values};
  PressureSlack s;
  s.lhs = lp_norm_components(p.grid, gp, 2.0);
  s.rhs = lp_norm_components(p.grid, cn, 2.0) + nu * lp_norm_components(p.grid, gw, 2.0);
  s.slack = s.rhs - s.lhs;
  return s;
}

/// RHS - LHS of |grad p|_2 <= |(u.grad)u|_2 + nu |grad omega|_2.
inline double pressure_estimate_slack(const ScalarField& p, const VectorField& u,
                                      const ScalarField& omega, double nu) {
  return pressure_estimate(p, u, omega, nu).slack;
}

}  // namespace navslip
