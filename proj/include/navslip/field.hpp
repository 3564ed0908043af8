#pragma once

/// \file field.hpp
/// \brief Grid-sampled scalar/vector fields and the discrete calculus on them.
///
/// Radial derivatives are second-order centred differences. Across the pole
/// the ghost value at r = -dr/2 is the node on the opposite ray, with a sign
/// flip for polar vector components. At the wall a field may carry its trace
/// at r = 1; the wall ghost is a cubic extrapolation through the trace (if
/// stored) and the outermost nodes. Angular derivatives are spectral.

#include "navslip/geometry.hpp"
#include "navslip/numerics.hpp"
#include "navslip/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace navslip {

/// Pole reflection rule: scalars are even across the pole, polar vector
/// components pick up a sign.
enum class Parity { Scalar, Vector };

struct ScalarField {
  PolarGrid grid;
  std::vector<double> values;
  /// Optional trace at r = 1, one value per boundary angle.
  std::optional<std::vector<double>> boundary;

  explicit ScalarField(const PolarGrid& g) : grid(g), values(g.size(), 0.0) {}
  ScalarField(const PolarGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw std::invalid_argument("ScalarField: size mismatch");
  }

  /// Samples f(r, theta) at the nodes; optionally also at r = 1.
  static ScalarField from_function(const PolarGrid& g,
                                   const std::function<double(double, double)>& f,
                                   bool with_boundary = false) {
    ScalarField s(g);
    for (int j = 0; j < g.n_r(); ++j) {
      for (int k = 0; k < g.n_theta(); ++k) s.values[g.index(j, k)] = f(g.r(j), g.theta(k));
    }
    if (with_boundary) {
      std::vector<double> b(g.n_theta());
      for (int k = 0; k < g.n_theta(); ++k) b[k] = f(1.0, g.theta(k));
      s.boundary = std::move(b);
    }
    return s;
  }

  double& operator()(int j, int k) { return values[grid.index(j, k)]; }
  double operator()(int j, int k) const { return values[grid.index(j, k)]; }
  bool all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
  }
};

/// Velocity-like field stored in the polar frame (u_r, u_theta).
struct VectorField {
  PolarGrid grid;
  std::vector<double> ur;
  std::vector<double> ut;
  std::optional<std::vector<double>> ur_boundary;
  std::optional<std::vector<double>> ut_boundary;

  explicit VectorField(const PolarGrid& g) : grid(g), ur(g.size(), 0.0), ut(g.size(), 0.0) {}

  /// Polar components given as functions of (r, theta).
  static VectorField from_polar(const PolarGrid& g,
                                const std::function<std::pair<double, double>(double, double)>& f,
                                bool with_boundary = false) {
    VectorField v(g);
    for (int j = 0; j < g.n_r(); ++j) {
      for (int k = 0; k < g.n_theta(); ++k) {
        auto [a, b] = f(g.r(j), g.theta(k));
        v.ur[g.index(j, k)] = a;
        v.ut[g.index(j, k)] = b;
      }
    }
    if (with_boundary) {
      std::vector<double> a(g.n_theta()), b(g.n_theta());
      for (int k = 0; k < g.n_theta(); ++k) std::tie(a[k], b[k]) = f(1.0, g.theta(k));
      v.ur_boundary = std::move(a);
      v.ut_boundary = std::move(b);
    }
    return v;
  }

  /// Cartesian components given as functions of (x, y).
  static VectorField from_cartesian(const PolarGrid& g,
                                    const std::function<std::pair<double, double>(double, double)>& f,
                                    bool with_boundary = false) {
    return from_polar(
        g,
        [&f](double r, double th) {
          const double c = std::cos(th), s = std::sin(th);
          auto [fx, fy] = f(r * c, r * s);
          return std::pair{fx * c + fy * s, -fx * s + fy * c};
        },
        with_boundary);
  }

  bool all_finite() const {
    auto fin = [](double v) { return std::isfinite(v); };
    return std::all_of(ur.begin(), ur.end(), fin) && std::all_of(ut.begin(), ut.end(), fin);
  }
};

inline void require_same_grid(const PolarGrid& a, const PolarGrid& b) {
  if (!(a == b)) throw std::invalid_argument("fields live on different grids");
}

// ---------------------------------------------------------------------------
// Elementary derivatives on flat node arrays
// ---------------------------------------------------------------------------

namespace detail {
// Cubic extrapolation to the ghost node r_N + dr. With a trace the nodes are
// (1, r_N, r_{N-1}, r_{N-2}), otherwise the four outermost nodes.
inline const std::array<double, 4>& wall_ghost_weights(bool with_trace) {
  static const std::array<double, 4> traced = [] {
    const double s[] = {0.0, -0.5, -1.5, -2.5};
    auto w = fd_weights(s, 0.5, 0);
    return std::array<double, 4>{w[0], w[1], w[2], w[3]};
  }();
  static const std::array<double, 4> plain{4.0, -6.0, 4.0, -1.0};
  return with_trace ? traced : plain;
}
}  // namespace detail

/// Centred differences everywhere. The wall ghost is a cubic extrapolation,
/// so the last-node error matches the interior one (h^2/6 times the third
/// derivative) up to O(h^3) and a second application stays second order.
inline std::vector<double> radial_derivative(const PolarGrid& g, std::span<const double> f,
                                             Parity parity,
                                             const std::vector<double>* boundary = nullptr) {
  const int nr = g.n_r(), nt = g.n_theta(), half = nt / 2;
  const double h = g.dr();
  const double sign = parity == Parity::Scalar ? 1.0 : -1.0;
  const auto& w = detail::wall_ghost_weights(boundary != nullptr);
  std::vector<double> d(g.size());
  for (int k = 0; k < nt; ++k) {
    auto at = [&](int j) { return f[g.index(j, k)]; };
    const double ghost = sign * f[g.index(0, (k + half) % nt)];
    d[g.index(0, k)] = (at(1) - ghost) / (2.0 * h);
    for (int j = 1; j < nr - 1; ++j) d[g.index(j, k)] = (at(j + 1) - at(j - 1)) / (2.0 * h);
    const int n = nr - 1;
    const double outer =
        boundary != nullptr
            ? w[0] * (*boundary)[k] + w[1] * at(n) + w[2] * at(n - 1) + w[3] * at(n - 2)
            : w[0] * at(n) + w[1] * at(n - 1) + w[2] * at(n - 2) + w[3] * at(n - 3);
    d[g.index(n, k)] = (outer - at(n - 1)) / (2.0 * h);
  }
  return d;
}

inline std::vector<double> angular_derivative(const PolarGrid& g, std::span<const double> f,
                                              int order = 1) {
  std::vector<double> d(g.size());
  const auto nt = static_cast<std::size_t>(g.n_theta());
  for (int j = 0; j < g.n_r(); ++j) {
    auto ring = ring_angular_derivative(f.subspan(j * nt, nt), order);
    std::copy(ring.begin(), ring.end(), d.begin() + static_cast<std::ptrdiff_t>(j * nt));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Boundary extraction
// ---------------------------------------------------------------------------

/// Default stencil width for wall extrapolation in diagnostics.
inline constexpr int kBoundaryStencil = 6;

namespace detail {
inline std::vector<double> boundary_stencil(const PolarGrid& g, const std::vector<double>* trace,
                                            int points, int derivative) {
  std::vector<double> nodes;
  if (trace != nullptr) nodes.push_back(1.0);
  const int from_grid = points - static_cast<int>(nodes.size());
  for (int i = 0; i < from_grid; ++i) nodes.push_back(g.r(g.n_r() - 1 - i));
  return fd_weights(nodes, 1.0, derivative);
}

inline std::vector<double> apply_boundary_stencil(const PolarGrid& g, std::span<const double> f,
                                                  const std::vector<double>* trace,
                                                  std::span<const double> w) {
  std::vector<double> out(g.n_theta());
  for (int k = 0; k < g.n_theta(); ++k) {
    std::size_t i = 0;
    double acc = 0.0;
    if (trace != nullptr) acc += w[i++] * (*trace)[k];
    for (int m = 0; i < w.size(); ++i, ++m) acc += w[i] * f[g.index(g.n_r() - 1 - m, k)];
    out[k] = acc;
  }
  return out;
}
}  // namespace detail

/// Value at r = 1: the stored trace if present, else polynomial extrapolation.
inline std::vector<double> boundary_value(const PolarGrid& g, std::span<const double> f,
                                          const std::vector<double>* trace,
                                          int points = kBoundaryStencil) {
  if (trace != nullptr) return *trace;
  auto w = detail::boundary_stencil(g, nullptr, points, 0);
  return detail::apply_boundary_stencil(g, f, nullptr, w);
}

/// One-sided radial derivative at r = 1 through `points` samples (trace included).
inline std::vector<double> boundary_radial_derivative(const PolarGrid& g, std::span<const double> f,
                                                      const std::vector<double>* trace,
                                                      int points = kBoundaryStencil) {
  auto w = detail::boundary_stencil(g, trace, points, 1);
  return detail::apply_boundary_stencil(g, f, trace, w);
}

/// u . tau on the wall for u = perp_grad(psi): d(psi)/dr at r = 1 from the
/// trace and three nodes (third order; a first-order wall trace would cost a
/// full order in curl(perp_grad psi) at the last ring).
inline std::vector<double> boundary_tangential_velocity(const ScalarField& psi) {
  const auto* trace = psi.boundary ? &*psi.boundary : nullptr;
  return boundary_radial_derivative(psi.grid, psi.values, trace, 4);
}

// ---------------------------------------------------------------------------
// Vector calculus
// ---------------------------------------------------------------------------

inline VectorField perp_grad(const ScalarField& psi) {
  const auto& g = psi.grid;
  VectorField u(g);
  const auto* trace = psi.boundary ? &*psi.boundary : nullptr;
  auto dth = angular_derivative(g, psi.values);
  u.ut = radial_derivative(g, psi.values, Parity::Scalar, trace);
  for (int j = 0; j < g.n_r(); ++j) {
    for (int k = 0; k < g.n_theta(); ++k) u.ur[g.index(j, k)] = -dth[g.index(j, k)] / g.r(j);
  }
  if (trace != nullptr) {
    auto db = ring_angular_derivative(*trace);
    for (double& v : db) v = -v;
    u.ur_boundary = std::move(db);
    // Extrapolated from the nodal u_theta rather than differentiated from psi,
    // so the trace carries the same smooth truncation error as the nodes.
    u.ut_boundary = boundary_value(g, u.ut, nullptr, 4);
  }
  return u;
}

namespace detail {
// (1/r) d/dr (r a) + sign (1/r) d/dtheta b, with a, b polar components.
inline ScalarField flux_combination(const VectorField& u, bool curl) {
  const auto& g = u.grid;
  const auto& a = curl ? u.ut : u.ur;
  const auto& b = curl ? u.ur : u.ut;
  const auto& a_trace = curl ? u.ut_boundary : u.ur_boundary;
  std::vector<double> ra(g.size());
  for (int j = 0; j < g.n_r(); ++j) {
    for (int k = 0; k < g.n_theta(); ++k) ra[g.index(j, k)] = g.r(j) * a[g.index(j, k)];
  }
  // r * (vector component) is even across the pole.
  auto dra = radial_derivative(g, ra, Parity::Scalar, a_trace ? &*a_trace : nullptr);
  auto dbt = angular_derivative(g, b);
  ScalarField out(g);
  const double sign = curl ? -1.0 : 1.0;
  for (int j = 0; j < g.n_r(); ++j) {
    for (int k = 0; k < g.n_theta(); ++k) {
      const auto i = g.index(j, k);
      out.values[i] = (dra[i] + sign * dbt[i]) / g.r(j);
    }
  }
  return out;
}
}  // namespace detail

/// curl u = (1/r)(d_r(r u_theta) - d_theta u_r).
inline ScalarField curl(const VectorField& u) { return detail::flux_combination(u, true); }

/// div u = (1/r)(d_r(r u_r) + d_theta u_theta).
inline ScalarField divergence(const VectorField& u) { return detail::flux_combination(u, false); }

/// Cartesian gradient (d_x f, d_y f) of a scalar.
inline std::pair<ScalarField, ScalarField> gradient(const ScalarField& f) {
  const auto& g = f.grid;
  const auto* trace = f.boundary ? &*f.boundary : nullptr;
  auto fr = radial_derivative(g, f.values, Parity::Scalar, trace);
  auto ft = angular_derivative(g, f.values);
  ScalarField gx(g), gy(g);
  for (int j = 0; j < g.n_r(); ++j) {
    for (int k = 0; k < g.n_theta(); ++k) {
      const auto i = g.index(j, k);
      const double c = std::cos(g.theta(k)), s = std::sin(g.theta(k));
      gx.values[i] = c * fr[i] - s * ft[i] / g.r(j);
      gy.values[i] = s * fr[i] + c * ft[i] / g.r(j);
    }
  }
  return {std::move(gx), std::move(gy)};
}

/// Flux-form Laplacian with the same cubic wall ghost as radial_derivative.
inline ScalarField laplacian(const ScalarField& f) {
  const auto& g = f.grid;
  const int nr = g.n_r(), nt = g.n_theta();
  const double h = g.dr();
  const auto& w = detail::wall_ghost_weights(f.boundary.has_value());
  auto ftt = angular_derivative(g, f.values, 2);
  ScalarField out(g);
  for (int k = 0; k < nt; ++k) {
    auto at = [&](int j) { return f.values[g.index(j, k)]; };
    const int n = nr - 1;
    const double ghost =
        f.boundary ? w[0] * (*f.boundary)[k] + w[1] * at(n) + w[2] * at(n - 1) + w[3] * at(n - 2)
                   : w[0] * at(n) + w[1] * at(n - 1) + w[2] * at(n - 2) + w[3] * at(n - 3);
    for (int j = 0; j < nr; ++j) {
      const double up = j < n ? at(j + 1) : ghost;
      const double rp = g.r(j) + 0.5 * h, rm = g.r(j) - 0.5 * h;
      const double down = j > 0 ? at(j - 1) : 0.0;  // multiplied by r_{1/2} = 0
      const double radial = (rp * (up - at(j)) - rm * (at(j) - down)) / (g.r(j) * h * h);
      out.values[g.index(j, k)] = radial + ftt[g.index(j, k)] / (g.r(j) * g.r(j));
    }
  }
  return out;
}

/// Cartesian components (u_x, u_y); traces are carried over when present.
inline std::pair<ScalarField, ScalarField> to_cartesian(const VectorField& u) {
  const auto& g = u.grid;
  ScalarField ux(g), uy(g);
  for (int j = 0; j < g.n_r(); ++j) {
    for (int k = 0; k < g.n_theta(); ++k) {
      const auto i = g.index(j, k);
      const double c = std::cos(g.theta(k)), s = std::sin(g.theta(k));
      ux.values[i] = u.ur[i] * c - u.ut[i] * s;
      uy.values[i] = u.ur[i] * s + u.ut[i] * c;
    }
  }
  if (u.ur_boundary && u.ut_boundary) {
    std::vector<double> bx(g.n_theta()), by(g.n_theta());
    for (int k = 0; k < g.n_theta(); ++k) {
      const double c = std::cos(g.theta(k)), s = std::sin(g.theta(k));
      bx[k] = (*u.ur_boundary)[k] * c - (*u.ut_boundary)[k] * s;
      by[k] = (*u.ur_boundary)[k] * s + (*u.ut_boundary)[k] * c;
    }
    ux.boundary = std::move(bx);
    uy.boundary = std::move(by);
  }
  return {std::move(ux), std::move(uy)};
}

inline VectorField from_cartesian(const ScalarField& ux, const ScalarField& uy) {
  require_same_grid(ux.grid, uy.grid);
  const auto& g = ux.grid;
  VectorField u(g);
  for (int j = 0; j < g.n_r(); ++j) {
    for (int k = 0; k < g.n_theta(); ++k) {
      const auto i = g.index(j, k);
      const double c = std::cos(g.theta(k)), s = std::sin(g.theta(k));
      u.ur[i] = ux.values[i] * c + uy.values[i] * s;
      u.ut[i] = -ux.values[i] * s + uy.values[i] * c;
    }
  }
  return u;
}

// ---------------------------------------------------------------------------
// Norms and integrals
// ---------------------------------------------------------------------------

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// L^p norm of the pointwise Euclidean magnitude of several component arrays.
/// p = infinity gives the grid max, a lower bound of the true supremum.
inline double lp_norm_components(const PolarGrid& g,
                                 std::span<const std::span<const double>> comps, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  auto magnitude = [&](std::size_t i) {
    if (comps.size() == 1) return std::abs(comps[0][i]);
    double s = 0.0;
    for (const auto& c : comps) s += c[i] * c[i];
    return std::sqrt(s);
  };
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, magnitude(i));
    return m;
  }
  double acc = 0.0;
  for (int j = 0; j < g.n_r(); ++j) {
    double ring = 0.0;
    for (int k = 0; k < g.n_theta(); ++k) ring += std::pow(magnitude(g.index(j, k)), p);
    acc += g.weight(j) * ring;
  }
  return std::pow(acc, 1.0 / p);
}

inline double lp_norm(const ScalarField& f, double p) {
  std::span<const double> c[] = {f.values};
  return lp_norm_components(f.grid, c, p);
}

inline double lp_norm(const VectorField& u, double p) {
  std::span<const double> c[] = {u.ur, u.ut};
  return lp_norm_components(u.grid, c, p);
}

/// L^p norm of the Cartesian velocity gradient, pointwise Frobenius magnitude.
inline double gradient_lp_norm(const VectorField& u, double p) {
  const auto [ux, uy] = to_cartesian(u);
  const auto [uxx, uxy] = gradient(ux);
  const auto [uyx, uyy] = gradient(uy);
  std::span<const double> c[] = {uxx.values, uxy.values, uyx.values, uyy.values};
  return lp_norm_components(u.grid, c, p);
}

/// Quadrature of a node array over the disk.
inline double integrate(const PolarGrid& g, std::span<const double> f) {
  double acc = 0.0;
  for (int j = 0; j < g.n_r(); ++j) {
    double ring = 0.0;
    for (int k = 0; k < g.n_theta(); ++k) ring += f[g.index(j, k)];
    acc += g.weight(j) * ring;
  }
  return acc;
}

/// Quadrature over the unit circle of a per-angle array.
inline double integrate_boundary(const PolarGrid& g, std::span<const double> f) {
  double acc = 0.0;
  for (double v : f) acc += v;
  return acc * g.dtheta();
}

inline double max_abs(std::span<const double> f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

/// Max over nodes of |u|.
inline double max_speed(const VectorField& u) { return lp_norm(u, kInfNorm); }

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline void write_csv(std::ostream& os, const ScalarField& f) {
  const auto& g = f.grid;
  os << "r,theta,value\n";
  os.precision(17);
  for (int j = 0; j < g.n_r(); ++j) {
    for (int k = 0; k < g.n_theta(); ++k) {
      os << g.r(j) << ',' << g.theta(k) << ',' << f(j, k) << '\n';
    }
  }
}

inline void write_csv(std::ostream& os, const VectorField& u) {
  const auto& g = u.grid;
  os << "r,theta,u_r,u_theta\n";
  os.precision(17);
  for (int j = 0; j < g.n_r(); ++j) {
    for (int k = 0; k < g.n_theta(); ++k) {
      const auto i = g.index(j, k);
      os << g.r(j) << ',' << g.theta(k) << ',' << u.ur[i] << ',' << u.ut[i] << '\n';
    }
  }
}

}  // namespace navslip
