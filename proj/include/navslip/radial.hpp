#pragma once

/// \file radial.hpp
/// \brief Per-Fourier-mode radial operators on the staggered grid.
///
/// For angular wavenumber k the discrete operator is
///   (L_k x)_j = [r_{j+1/2}(x_{j+1} - x_j) - r_{j-1/2}(x_j - x_{j-1})] / (r_j dr^2) - k^2 x_j / r_j^2
/// with r_{1/2} = 0 at the pole (no ghost needed there) and, at the wall, the
/// cubic ghost through the Dirichlet value b and the three outermost nodes.
/// The wall row therefore reaches x_{N-2}; one row operation with row N-1
/// restores a tridiagonal system.

#include "navslip/field.hpp"
#include "navslip/numerics.hpp"
#include "navslip/spectral.hpp"

#include <span>
#include <vector>

namespace navslip {

class RadialOperator {
 public:
  explicit RadialOperator(const PolarGrid& g) : n_(g.n_r()), r_(g.r_nodes().begin(), g.r_nodes().end()) {
    const double h = g.dr();
    const auto& w = detail::wall_ghost_weights(true);
    lower_.resize(n_);
    upper_.resize(n_);
    centre_.resize(n_);
    for (int j = 0; j < n_; ++j) {
      const double rp = r_[j] + 0.5 * h, rm = j == 0 ? 0.0 : r_[j] - 0.5 * h;
      const double s = 1.0 / (r_[j] * h * h);
      lower_[j] = rm * s;
      upper_[j] = rp * s;
      centre_[j] = -(rp + rm) * s;
    }
    const int n = n_ - 1;
    // Fold the ghost into the wall row.
    centre_[n] += upper_[n] * w[1];
    lower_[n] += upper_[n] * w[2];
    far_ = upper_[n] * w[3];
    boundary_ = upper_[n] * w[0];
    upper_[n] = 0.0;
  }

  int size() const { return n_; }
  /// Weight of the Dirichlet wall value in the last row.
  double boundary_coefficient() const { return boundary_; }

  /// y = L_k x + boundary_coefficient * b e_N.
  template <typename T>
  std::vector<T> apply(int k, std::span<const T> x, T b) const {
    std::vector<T> y(n_);
    const double k2 = static_cast<double>(k) * k;
    for (int j = 0; j < n_; ++j) {
      T acc = (centre_[j] - k2 / (r_[j] * r_[j])) * x[j];
      if (j > 0) acc += lower_[j] * x[j - 1];
      if (j + 1 < n_) acc += upper_[j] * x[j + 1];
      y[j] = acc;
    }
    y[n_ - 1] += far_ * x[n_ - 3] + boundary_ * b;
    return y;
  }

  /// Solves (sigma I - tau L_k) x = rhs in place, wall value taken as zero
  /// (callers add tau * boundary_coefficient * b to rhs[N]).
  template <typename T>
  void solve_shifted(int k, double sigma, double tau, std::span<T> rhs) const {
    const int n = n_;
    const double k2 = static_cast<double>(k) * k;
    std::vector<double> lo(n), di(n), up(n);
    for (int j = 0; j < n; ++j) {
      lo[j] = -tau * lower_[j];
      up[j] = -tau * upper_[j];
      di[j] = sigma - tau * (centre_[j] - k2 / (r_[j] * r_[j]));
    }
    // Row N: far * x_{N-2} + lo * x_{N-1} + di * x_N. Eliminate x_{N-2}
    // with row N-1, whose x_{N-2} coefficient is lo[N-2].
    const double far = -tau * far_;
    if (far != 0.0) {
      const double f = far / lo[n - 2];
      lo[n - 1] -= f * di[n - 2];
      di[n - 1] -= f * up[n - 2];
      rhs[n - 1] -= f * rhs[n - 2];
    }
    solve_tridiagonal<T>(lo, di, up, rhs);
  }

 private:
  int n_;
  std::vector<double> r_;
  std::vector<double> lower_, centre_, upper_;
  double far_ = 0.0;
  double boundary_ = 0.0;
};

}  // namespace navslip
