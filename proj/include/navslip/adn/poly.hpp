#pragma once

/// \file poly.hpp
/// \brief Complex polynomials in one variable sigma, matrices of them, and
/// root finding through companion-matrix eigenvalues.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace navslip::adn {

using cplx = std::complex<double>;

/// Ascending coefficients; the zero polynomial has no coefficients.
class PolyC {
 public:
  PolyC() = default;
  PolyC(std::vector<cplx> c) : c_(std::move(c)) { trim(); }
  PolyC(cplx constant) : c_{constant} { trim(); }
  PolyC(double constant) : PolyC(cplx(constant)) {}

  /// sigma - z
  static PolyC linear_factor(cplx z) { return PolyC({-z, cplx(1.0)}); }
  /// a + b sigma
  static PolyC affine(double a, double b) { return PolyC({cplx(a), cplx(b)}); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<cplx>& coeffs() const { return c_; }
  cplx operator[](int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : cplx(0.0); }
  cplx leading() const { return c_.empty() ? cplx(0.0) : c_.back(); }

  cplx operator()(cplx z) const {
    cplx acc(0.0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  PolyC derivative(int order = 1) const {
    std::vector<cplx> d = c_;
    for (int o = 0; o < order && !d.empty(); ++o) {
      std::vector<cplx> e(d.size() > 1 ? d.size() - 1 : 0);
      for (std::size_t i = 1; i < d.size(); ++i) e[i - 1] = static_cast<double>(i) * d[i];
      d = std::move(e);
    }
    return PolyC(std::move(d));
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Drops leading coefficients below tol * max|coeff|.
  PolyC trimmed(double tol) const {
    const double scale = max_abs_coeff();
    std::vector<cplx> c = c_;
    while (!c.empty() && std::abs(c.back()) <= tol * scale) c.pop_back();
    return PolyC(std::move(c));
  }

  PolyC& operator+=(const PolyC& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), cplx(0.0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  PolyC& operator-=(const PolyC& o) { return *this += -o; }
  PolyC operator-() const {
    PolyC r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }
  friend PolyC operator+(PolyC a, const PolyC& b) { return a += b; }
  friend PolyC operator-(PolyC a, const PolyC& b) { return a -= b; }
  friend PolyC operator*(const PolyC& a, const PolyC& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<cplx> c(a.c_.size() + b.c_.size() - 1, cplx(0.0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    }
    return PolyC(std::move(c));
  }
  friend PolyC operator*(cplx s, const PolyC& a) {
    std::vector<cplx> c = a.c_;
    for (auto& v : c) v *= s;
    return PolyC(std::move(c));
  }

  PolyC pow(int n) const {
    PolyC r(1.0);
    for (int i = 0; i < n; ++i) r = r * *this;
    return r;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == cplx(0.0)) c_.pop_back();
  }
  std::vector<cplx> c_;
};

struct DivMod {
  PolyC quotient;
  PolyC remainder;
  /// max coefficient of |dividend - (quotient * divisor + remainder)|.
  double residual;
};

/// Long division; the divisor's leading coefficient must be nonzero.
inline DivMod divmod(const PolyC& a, const PolyC& d) {
  if (d.is_zero()) throw std::invalid_argument("divmod: zero divisor");
  const int n = a.degree(), m = d.degree();
  if (n < m) return {PolyC{}, a, 0.0};
  std::vector<cplx> r = a.coeffs();
  std::vector<cplx> q(n - m + 1, cplx(0.0));
  const cplx lead = d.leading();
  for (int k = n - m; k >= 0; --k) {
    const cplx f = r[k + m] / lead;
    q[k] = f;
    for (int i = 0; i <= m; ++i) r[k + i] -= f * d[i];
    r[k + m] = 0.0;
  }
  r.resize(m);
  DivMod out{PolyC(std::move(q)), PolyC(std::move(r)), 0.0};
  out.residual = (a - (out.quotient * d + out.remainder)).max_abs_coeff();
  return out;
}

/// Rectangular matrix of polynomials, row-major.
class MatPolyC {
 public:
  MatPolyC(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("MatPolyC: negative dimension");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  PolyC& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const PolyC& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  friend MatPolyC operator*(const MatPolyC& a, const MatPolyC& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("MatPolyC: dimension mismatch in product");
    MatPolyC c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i) {
      for (int j = 0; j < b.cols_; ++j) {
        PolyC s;
        for (int k = 0; k < a.cols_; ++k) s += a(i, k) * b(k, j);
        c(i, j) = std::move(s);
      }
    }
    return c;
  }

  MatPolyC minor(int skip_row, int skip_col) const {
    MatPolyC m(rows_ - 1, cols_ - 1);
    for (int i = 0, mi = 0; i < rows_; ++i) {
      if (i == skip_row) continue;
      for (int j = 0, mj = 0; j < cols_; ++j) {
        if (j == skip_col) continue;
        m(mi, mj++) = (*this)(i, j);
      }
      ++mi;
    }
    return m;
  }

  /// Laplace expansion along the first row (the systems here are tiny).
  PolyC det() const {
    if (rows_ != cols_) throw std::invalid_argument("MatPolyC::det: not square");
    if (rows_ == 0) return PolyC(1.0);
    if (rows_ == 1) return a_[0];
    PolyC acc;
    for (int j = 0; j < cols_; ++j) {
      if ((*this)(0, j).is_zero()) continue;
      const PolyC t = (*this)(0, j) * minor(0, j).det();
      acc += (j % 2 == 0) ? t : -t;
    }
    return acc;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& p : a_) m = std::max(m, p.max_abs_coeff());
    return m;
  }

 private:
  int rows_;
  int cols_;
  std::vector<PolyC> a_;
};

/// Cofactor transpose: A adj(A) = det(A) I.
inline MatPolyC adjugate(const MatPolyC& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("adjugate: matrix not square");
  const int n = a.rows();
  MatPolyC adj(n, n);
  if (n == 1) {
    adj(0, 0) = PolyC(1.0);
    return adj;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const PolyC c = a.minor(i, j).det();
      adj(j, i) = ((i + j) % 2 == 0) ? c : -c;
    }
  }
  return adj;
}

struct Root {
  cplx z;
  int multiplicity = 1;
};

/// Relative tolerance for merging eigenvalues into one multiple root.
inline constexpr double kRootCluster = 1e-7;

/// Roots with multiplicity. sigma is first rescaled by the Fujiwara bound rho
/// so the roots have unit scale; companion eigenvalues within kRootCluster *
/// max(1, |w|) in the scaled variable are merged, and each cluster mean is
/// polished by Newton on the (multiplicity - 1)-th derivative, where the root
/// is simple.
inline std::vector<Root> roots(const PolyC& p_in) {
  const PolyC p = p_in.trimmed(1e-14);
  if (p.is_zero()) throw std::invalid_argument("roots: zero polynomial");
  const int n = p.degree();
  if (n == 0) return {};
  double rho = 0.0;
  for (int k = 0; k < n; ++k) rho = std::max(rho, std::pow(std::abs(p[k] / p.leading()), 1.0 / (n - k)));
  if (!(rho > 0.0)) rho = 1.0;
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -p[i] / p.leading() / std::pow(rho, n - i);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("roots: eigenvalue iteration failed");
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  std::vector<bool> used(n, false);
  std::vector<Root> out;
  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    std::vector<cplx> members{ev[i]};
    used[i] = true;
    for (int j = i + 1; j < n; ++j) {
      if (!used[j] && std::abs(ev[j] - ev[i]) <= kRootCluster * std::max(1.0, std::abs(ev[i]))) {
        members.push_back(ev[j]);
        used[j] = true;
      }
    }
    cplx z(0.0);
    for (auto m : members) z += m;
    z *= rho / static_cast<double>(members.size());
    const int mult = static_cast<int>(members.size());
    const PolyC f = p.derivative(mult - 1);
    const PolyC df = f.derivative();
    for (int it = 0; it < 20; ++it) {
      const cplx d = df(z);
      if (d == cplx(0.0)) break;
      const cplx step = f(z) / d;
      const cplx next = z - step;
      if (std::abs(f(next)) > std::abs(f(z))) break;
      z = next;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
    }
    out.push_back({z, mult});
  }
  return out;
}

/// prod (sigma - z)^multiplicity
inline PolyC from_roots(const std::vector<Root>& rs) {
  PolyC p(1.0);
  for (const auto& r : rs) p = p * PolyC::linear_factor(r.z).pow(r.multiplicity);
  return p;
}

}  // namespace navslip::adn
