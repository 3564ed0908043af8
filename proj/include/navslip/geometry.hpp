#pragma once

/// \file geometry.hpp
/// \brief Staggered polar discretization of the unit disk and its boundary frame.
///
/// Radial nodes sit at cell centres r_j = (j - 1/2) dr, so no node lands on the
/// pole. Angular nodes are uniform and the angular direction is treated
/// spectrally, which is why n_theta must be even.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace navslip {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class PolarGrid {
 public:
  PolarGrid(int n_r, int n_theta) : n_r_(n_r), n_theta_(n_theta) {
    if (n_r < 4) {
      throw std::invalid_argument("PolarGrid: n_r must be >= 4, got " + std::to_string(n_r));
    }
    if (n_theta < 8) {
      throw std::invalid_argument("PolarGrid: n_theta must be >= 8, got " +
                                  std::to_string(n_theta));
    }
    if (n_theta % 2 != 0) {
      throw std::invalid_argument("PolarGrid: n_theta must be even, got " +
                                  std::to_string(n_theta));
    }
    dr_ = 1.0 / n_r;
    dtheta_ = kTwoPi / n_theta;
    r_.resize(n_r);
    for (int j = 0; j < n_r; ++j) r_[j] = (j + 0.5) * dr_;
    theta_.resize(n_theta);
    for (int k = 0; k < n_theta; ++k) theta_[k] = k * dtheta_;
    build_radial_weights();
  }

  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  /// Number of retained angular modes in a half spectrum (0..n_theta/2).
  int n_modes() const { return n_theta_ / 2 + 1; }
  double dr() const { return dr_; }
  double dtheta() const { return dtheta_; }
  std::size_t size() const { return static_cast<std::size_t>(n_r_) * n_theta_; }

  double r(int j) const { return r_[j]; }
  double theta(int k) const { return theta_[k]; }
  std::span<const double> r_nodes() const { return r_; }
  std::span<const double> theta_nodes() const { return theta_; }

  /// Ring-major flat index.
  std::size_t index(int j, int k) const {
    return static_cast<std::size_t>(j) * n_theta_ + k;
  }

  /// Weights W_j with sum_j W_j f(r_j) ~ int_0^1 f(r) r dr.
  std::span<const double> radial_weights() const { return radial_w_; }
  double weight(int j) const { return radial_w_[j] * dtheta_; }

  /// Smallest physical spacing, entering the advective CFL bound.
  double min_spacing() const { return std::min(dr_, r_[0] * dtheta_); }

  bool operator==(const PolarGrid& o) const {
    return n_r_ == o.n_r_ && n_theta_ == o.n_theta_;
  }

 private:
  // Midpoint rule on the staggered nodes plus symmetric corrections on the
  // three outermost nodes at each end, exact for polynomials of degree <= 5.
  void build_radial_weights() {
    const int n = n_r_;
    std::vector<double> v(n, dr_);
    const int nc = std::min(3, n / 2);
    Eigen::MatrixXd a(nc, nc);
    Eigen::VectorXd b(nc);
    for (int m = 0; m < nc; ++m) {
      const int p = 2 * m;
      const double exact = std::pow(0.5, p + 1) * 2.0 / (p + 1);  // int_0^1 (r-1/2)^p
      double midpoint = 0.0;
      for (int j = 0; j < n; ++j) midpoint += dr_ * std::pow(r_[j] - 0.5, p);
      b(m) = exact - midpoint;
      for (int c = 0; c < nc; ++c) {
        const double lo = std::pow(r_[c] - 0.5, p);
        const double hi = std::pow(r_[n - 1 - c] - 0.5, p);
        a(m, c) = lo + hi;
      }
    }
    const Eigen::VectorXd corr = a.fullPivLu().solve(b);
    for (int c = 0; c < nc; ++c) {
      v[c] += corr(c);
      v[n - 1 - c] += corr(c);
    }
    radial_w_.resize(n);
    for (int j = 0; j < n; ++j) radial_w_[j] = v[j] * r_[j];
  }

  int n_r_;
  int n_theta_;
  double dr_{};
  double dtheta_{};
  std::vector<double> r_;
  std::vector<double> theta_;
  std::vector<double> radial_w_;
};

inline PolarGrid build_grid(int n_r, int n_theta) { return PolarGrid(n_r, n_theta); }

/// Friction coefficient as a closed-form function of the boundary angle.
/// Either a constant or a finite real Fourier series
/// alpha(theta) = sum_k a_k cos(k theta) + b_k sin(k theta).
class AlphaSpec {
 public:
  struct Term {
    int k;
    double a;
    double b;
  };

  AlphaSpec() = default;
  static AlphaSpec constant(double c) {
    AlphaSpec s;
    s.terms_.push_back({0, c, 0.0});
    return s;
  }
  static AlphaSpec fourier(std::vector<Term> terms) {
    for (const auto& t : terms) {
      if (t.k < 0) throw std::invalid_argument("AlphaSpec: negative wavenumber");
      if (!std::isfinite(t.a) || !std::isfinite(t.b)) {
        throw std::invalid_argument("AlphaSpec: non-finite coefficient");
      }
    }
    AlphaSpec s;
    s.terms_ = std::move(terms);
    return s;
  }

  double operator()(double theta) const { return eval(theta, 0); }
  /// n-th angular derivative.
  double eval(double theta, int derivative) const {
    double acc = 0.0;
    for (const auto& t : terms_) {
      const double kt = t.k * theta;
      double c = std::cos(kt), s = std::sin(kt);
      // d/dtheta (a cos + b sin) = k(-a sin + b cos)
      double a = t.a, b = t.b;
      for (int d = 0; d < derivative; ++d) {
        const double na = t.k * b;
        const double nb = -t.k * a;
        a = na;
        b = nb;
      }
      acc += a * c + b * s;
    }
    return acc;
  }

  bool is_constant() const {
    for (const auto& t : terms_) {
      if (t.k != 0 && (t.a != 0.0 || t.b != 0.0)) return false;
    }
    return true;
  }
  double min_value(int samples = 1024) const {
    double m = eval(0.0, 0);
    for (int i = 1; i < samples; ++i) m = std::min(m, eval(kTwoPi * i / samples, 0));
    return m;
  }
  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_{{0, 0.0, 0.0}};
};

struct Vec2 {
  double x;
  double y;
};

/// Per-angle boundary data: friction, curvature and the (n, tau) frame.
struct BoundaryTrace {
  std::vector<double> alpha;
  std::vector<double> kappa;
  std::vector<Vec2> normal;
  std::vector<Vec2> tangent;

  std::size_t size() const { return alpha.size(); }
  /// 2 kappa - alpha, the factor in the vorticity boundary value.
  double shift(std::size_t k) const { return 2.0 * kappa[k] - alpha[k]; }
};

inline BoundaryTrace boundary_trace(const PolarGrid& grid,
                                    const std::function<double(double)>& alpha_spec) {
  BoundaryTrace t;
  const int n = grid.n_theta();
  t.alpha.resize(n);
  t.kappa.assign(n, 1.0);
  t.normal.resize(n);
  t.tangent.resize(n);
  for (int k = 0; k < n; ++k) {
    const double th = grid.theta(k);
    const double a = alpha_spec(th);
    if (!std::isfinite(a)) {
      throw std::invalid_argument("boundary_trace: non-finite alpha at theta=" +
                                  std::to_string(th));
    }
    t.alpha[k] = a;
    t.normal[k] = {std::cos(th), std::sin(th)};
    t.tangent[k] = {-std::sin(th), std::cos(th)};
  }
  return t;
}

inline BoundaryTrace boundary_trace(const PolarGrid& grid, const AlphaSpec& alpha) {
  return boundary_trace(grid, [&alpha](double th) { return alpha(th); });
}

}  // namespace navslip
