#pragma once

/// \file biot_savart.hpp
/// \brief Velocity from vorticity through the Dirichlet stream function, and
/// samplers for smooth test fields.

#include "navslip/field.hpp"
#include "navslip/geometry.hpp"
#include "navslip/radial.hpp"
#include "navslip/spectral.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace navslip {

/// Mode-wise solver for Delta psi = omega, psi = 0 on r = 1.
class PoissonDirichletSolver {
 public:
  explicit PoissonDirichletSolver(const PolarGrid& g) : grid_(g), op_(g) {}

  const PolarGrid& grid() const { return grid_; }
  const RadialOperator& radial() const { return op_; }

  /// In-place solve on the angular spectrum.
  void solve_modes(ModeField& m) const {
    std::vector<cplx> col(grid_.n_r());
    for (int k = 0; k < grid_.n_modes(); ++k) {
      for (int j = 0; j < grid_.n_r(); ++j) col[j] = m(j, k);
      op_.solve_shifted<cplx>(k, 0.0, -1.0, col);
      for (int j = 0; j < grid_.n_r(); ++j) m(j, k) = col[j];
    }
  }

  ScalarField solve(const ScalarField& omega) const {
    require_same_grid(grid_, omega.grid);
    auto m = to_modes(grid_, omega.values);
    solve_modes(m);
    return from_solved_modes(m);
  }

  ScalarField solve_from_modes(ModeField m) const {
    solve_modes(m);
    return from_solved_modes(m);
  }

 private:
  ScalarField from_solved_modes(const ModeField& m) const {
    ScalarField psi(grid_, from_modes(grid_, m));
    psi.boundary = std::vector<double>(grid_.n_theta(), 0.0);
    return psi;
  }

  PolarGrid grid_;
  RadialOperator op_;
};

inline ScalarField solve_poisson_dirichlet(const ScalarField& omega) {
  return PoissonDirichletSolver(omega.grid).solve(omega);
}

/// K(omega) = perp_grad of the Dirichlet stream function.
inline VectorField biot_savart(const ScalarField& omega) {
  return perp_grad(solve_poisson_dirichlet(omega));
}

// ---------------------------------------------------------------------------
// Navier-compatible samples
// ---------------------------------------------------------------------------

/// Radial profile P(r) = r^k + beta r^{k+2} + gamma r^{k+4} with P(1) = 0 and
/// P''(1) + (alpha - 1) P'(1) = 0, the disk form of the Navier condition for
/// u = perp_grad(P(r) e^{ik theta}).
struct NavierProfile {
  int k;
  double beta;
  double gamma;

  double value(double r) const {
    return std::pow(r, k) * (1.0 + beta * r * r + gamma * r * r * r * r);
  }
  /// P(r) / r, regular at the pole for k >= 1.
  double over_r(double r) const {
    return std::pow(r, k - 1) * (1.0 + beta * r * r + gamma * r * r * r * r);
  }
  double derivative(double r) const {
    return k * (k == 0 ? 0.0 : std::pow(r, k - 1)) + beta * (k + 2) * std::pow(r, k + 1) +
           gamma * (k + 4) * std::pow(r, k + 3);
  }
  /// Laplacian of P(r) e^{ik theta}, divided by e^{ik theta}.
  double laplacian(double r) const {
    // Delta(r^m e^{ik theta}) = (m^2 - k^2) r^{m-2} e^{ik theta}
    const double b = beta * ((k + 2.0) * (k + 2.0) - k * k);
    const double c = gamma * ((k + 4.0) * (k + 4.0) - k * k);
    return b * std::pow(r, k) + c * std::pow(r, k + 2);
  }
};

inline NavierProfile navier_profile(int k, double alpha) {
  auto q = [alpha](double m) { return m * (m + alpha - 2.0); };
  const double det = q(k + 4) - q(k + 2);  // = 4k + 8 + 2 alpha
  if (std::abs(det) < 1e-12 * (1.0 + std::abs(alpha))) {
    throw std::invalid_argument("sample_navier_field: boundary system singular for mode k=" +
                                std::to_string(k) + " at alpha=" + std::to_string(alpha));
  }
  // 1 + beta + gamma = 0, q(k) + beta q(k+2) + gamma q(k+4) = 0
  const double beta = (q(k + 4) - q(k)) / (q(k + 2) - q(k + 4));
  return {k, beta, -1.0 - beta};
}

struct NavierSample {
  ScalarField psi;
  ScalarField omega;
  VectorField u;
};

/// Random member of the Navier class for constant alpha: psi is a sum of
/// NavierProfile modes k = 0..max_mode with Gaussian amplitudes. Every field
/// is sampled analytically, including the wall traces.
inline NavierSample sample_navier(std::uint64_t seed, double alpha, const PolarGrid& g,
                                  int max_mode = 2) {
  if (!std::isfinite(alpha)) throw std::invalid_argument("sample_navier_field: non-finite alpha");
  if (max_mode < 0 || 2 * max_mode >= g.n_theta()) {
    throw std::invalid_argument("sample_navier_field: max_mode not resolved by the grid");
  }
  std::vector<NavierProfile> prof;
  for (int k = 0; k <= max_mode; ++k) prof.push_back(navier_profile(k, alpha));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> amp(max_mode + 1);
  for (int k = 0; k <= max_mode; ++k) {
    const double re = nd(rng);
    const double im = nd(rng);
    amp[k] = k == 0 ? cplx(re, 0.0) : cplx(re, im);
  }
  auto eval = [&](double r, double th, auto&& radial, bool angular) {
    double acc = 0.0;
    for (int k = 0; k <= max_mode; ++k) {
      cplx e = amp[k] * std::exp(cplx(0.0, k * th));
      if (angular) e *= cplx(0.0, k);
      acc += e.real() * radial(prof[k], r);
    }
    return acc;
  };
  auto psi_f = [&](double r, double th) {
    return eval(r, th, [](const NavierProfile& p, double x) { return p.value(x); }, false);
  };
  auto omega_f = [&](double r, double th) {
    return eval(r, th, [](const NavierProfile& p, double x) { return p.laplacian(x); }, false);
  };
  auto u_f = [&](double r, double th) {
    const double ur = -eval(r, th, [](const NavierProfile& p, double x) { return p.over_r(x); }, true);
    const double ut = eval(r, th, [](const NavierProfile& p, double x) { return p.derivative(x); }, false);
    return std::pair{ur, ut};
  };
  NavierSample s{ScalarField::from_function(g, psi_f, true),
                 ScalarField::from_function(g, omega_f, true),
                 VectorField::from_polar(g, u_f, true)};
  return s;
}

inline VectorField sample_navier_field(std::uint64_t seed, double alpha, const PolarGrid& g,
                                       int max_mode = 2) {
  return sample_navier(seed, alpha, g, max_mode).u;
}

/// Variant taking the boundary data; alpha must be constant along the wall.
inline VectorField sample_navier_field(std::uint64_t seed, const PolarGrid& g,
                                       const BoundaryTrace& trace, int max_mode = 2) {
  for (double a : trace.alpha) {
    if (a != trace.alpha.front()) {
      throw std::invalid_argument("sample_navier_field: alpha must be constant");
    }
  }
  return sample_navier_field(seed, trace.alpha.front(), g, max_mode);
}

/// Random smooth scalar: a polynomial in (x, y) of total degree <= degree with
/// standard normal coefficients.
inline ScalarField random_smooth_field(std::uint64_t seed, const PolarGrid& g, int degree = 4) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<std::pair<std::pair<int, int>, double>> terms;
  for (int d = 0; d <= degree; ++d) {
    for (int a = 0; a <= d; ++a) terms.push_back({{a, d - a}, nd(rng)});
  }
  return ScalarField::from_function(g, [&terms](double r, double th) {
    const double x = r * std::cos(th), y = r * std::sin(th);
    double acc = 0.0;
    for (const auto& [e, c] : terms) acc += c * std::pow(x, e.first) * std::pow(y, e.second);
    return acc;
  });
}

}  // namespace navslip
