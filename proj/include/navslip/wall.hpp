#pragma once

/// \file wall.hpp
/// \brief Boundary quantities at r = 1: strain, Navier residuals, vorticity data.

#include "navslip/field.hpp"
#include "navslip/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace navslip {

/// (2 kappa - alpha) u.tau on the wall, the Dirichlet data for the vorticity.
inline std::vector<double> vorticity_boundary(const ScalarField& psi, const BoundaryTrace& trace) {
  if (!psi.all_finite()) throw std::invalid_argument("vorticity_boundary: non-finite psi");
  auto ut = boundary_tangential_velocity(psi);
  for (std::size_t k = 0; k < ut.size(); ++k) ut[k] *= trace.shift(k);
  return ut;
}

/// Wall values of a velocity snapshot, from traces when stored, otherwise
/// extrapolated with the default stencil.
struct WallState {
  std::vector<double> ut;       ///< u . tau
  std::vector<double> ur;       ///< u . n
  std::vector<double> dr_ut;    ///< d_r u_theta
  std::vector<double> strain;   ///< (Du)_S n . tau
  std::vector<double> omega;    ///< vorticity at r = 1
};

inline WallState wall_state(const VectorField& u, const ScalarField& omega,
                            int points = kBoundaryStencil) {
  require_same_grid(u.grid, omega.grid);
  const auto& g = u.grid;
  const auto* ut_tr = u.ut_boundary ? &*u.ut_boundary : nullptr;
  const auto* ur_tr = u.ur_boundary ? &*u.ur_boundary : nullptr;
  const auto* w_tr = omega.boundary ? &*omega.boundary : nullptr;
  WallState s;
  s.ut = boundary_value(g, u.ut, ut_tr, points);
  s.ur = boundary_value(g, u.ur, ur_tr, points);
  s.dr_ut = boundary_radial_derivative(g, u.ut, ut_tr, points);
  s.omega = boundary_value(g, omega.values, w_tr, points);
  const auto dth_ur = ring_angular_derivative(s.ur);
  s.strain.resize(s.ut.size());
  for (std::size_t k = 0; k < s.ut.size(); ++k) {
    s.strain[k] = 0.5 * (s.dr_ut[k] - s.ut[k] + dth_ur[k]);
  }
  return s;
}

struct ResidualCurve {
  std::string name;
  std::vector<double> values;
  double max_abs = 0.0;
};

struct ResidualReport {
  ResidualCurve navier;     ///< (a) 2 (Du)_S n.tau + alpha u.tau
  ResidualCurve identity;   ///< (b) omega/2 - (Du)_S n.tau - kappa u.tau
  ResidualCurve normal_form;///< (c) d_r u_theta + (alpha - kappa) u.tau
  ResidualCurve tangency;   ///< u . n
  int n_r = 0;
  int n_theta = 0;
  double tolerance = 0.0;
  bool passed(double tol) const {
    return navier.max_abs <= tol && identity.max_abs <= tol && normal_form.max_abs <= tol;
  }
};

inline ResidualReport navier_residuals(const VectorField& u, const ScalarField& omega,
                                       const BoundaryTrace& trace,
                                       int points = kBoundaryStencil) {
  const auto s = wall_state(u, omega, points);
  const std::size_t n = s.ut.size();
  if (trace.size() != n) throw std::invalid_argument("navier_residuals: trace size mismatch");
  ResidualReport r;
  r.n_r = u.grid.n_r();
  r.n_theta = u.grid.n_theta();
  r.navier.name = "navier";
  r.identity.name = "identity";
  r.normal_form.name = "normal_form";
  r.tangency.name = "tangency";
  for (auto* c : {&r.navier, &r.identity, &r.normal_form}) c->values.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = trace.alpha[k], kap = trace.kappa[k];
    r.navier.values[k] = 2.0 * s.strain[k] + a * s.ut[k];
    r.identity.values[k] = 0.5 * s.omega[k] - s.strain[k] - kap * s.ut[k];
    r.normal_form.values[k] = s.dr_ut[k] + (a - kap) * s.ut[k];
  }
  r.tangency.values = s.ur;
  for (auto* c : {&r.navier, &r.identity, &r.normal_form, &r.tangency}) {
    c->max_abs = max_abs(c->values);
  }
  return r;
}

}  // namespace navslip
