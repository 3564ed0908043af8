#pragma once

/// \file adn.hpp
/// \brief Numeric checker for Agmon-Douglis-Nirenberg ellipticity of a
/// boundary value problem L u = f in the disk, B u = g on the circle.
///
/// Symbols use xi^alpha literally (no factors of i). Conditions quantified
/// over all x and xi are checked on finite samples.

#include "navslip/adn/poly.hpp"
#include "navslip/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace navslip::adn {

using Point = std::vector<double>;

struct BoundaryPoint {
  Point x;
  Point n;
  Point tau;
};

/// One monomial coefficient * D^mi in entry (row, col); indices are 0-based.
struct Term {
  int row;
  int col;
  std::vector<int> mi;
  std::function<double(const Point&)> c;
};

struct AdnProblem {
  std::string name;
  int dim = 2;
  int M = 0;
  int m = 0;
  std::vector<Term> L;
  std::vector<Term> B;
  std::vector<int> s, t, r;
  std::function<BoundaryPoint(double)> boundary;
};

class AdnError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A root on the real axis along the pencil xi + sigma xi'.
class DegenerateRoot : public std::runtime_error {
 public:
  DegenerateRoot(const std::string& what, cplx root) : std::runtime_error(what), root(root) {}
  cplx root;
};

inline constexpr double kDetTol = 1e-10;
inline constexpr double kImagTol = 1e-9;
inline constexpr double kRankTol = 1e-8;

/// Unit circle: x = n = (cos a, sin a), tau = (-sin a, cos a).
inline BoundaryPoint disk_boundary(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {{c, s}, {c, s}, {-s, c}};
}

namespace detail {
inline std::string describe(int i, int j, const std::vector<int>& mi) {
  std::ostringstream os;
  os << "(i=" << i + 1 << ", j=" << j + 1 << ", multi-index=[";
  for (std::size_t k = 0; k < mi.size(); ++k) os << (k ? "," : "") << mi[k];
  os << "])";
  return os.str();
}
inline int order(const std::vector<int>& mi) {
  int o = 0;
  for (int v : mi) o += v;
  return o;
}
}  // namespace detail

/// Evaluators of the principal symbols along a pencil xi + sigma xi'.
class PrincipalParts {
 public:
  explicit PrincipalParts(const AdnProblem& p) : p_(p) {
    if (p.M <= 0) throw AdnError("adn: M must be positive");
    if (static_cast<int>(p.s.size()) != p.M || static_cast<int>(p.t.size()) != p.M) {
      throw AdnError("adn: weights s and t need M entries");
    }
    int total = 0;
    for (int i = 0; i < p.M; ++i) total += p.s[i] + p.t[i];
    if (total < 0 || total % 2 != 0) throw AdnError("adn: sum(s + t) must be even and >= 0");
    if (p.m != total / 2) {
      throw AdnError("adn: m=" + std::to_string(p.m) + " but the weights give order 2m=" +
                     std::to_string(total));
    }
    if (static_cast<int>(p.r.size()) != p.m) {
      throw AdnError("adn: the boundary operator needs exactly m rows (weights r has " +
                     std::to_string(p.r.size()) + ")");
    }
    for (const auto& term : p.L) {
      check_term(term, p.M, "L");
      const int w = p.s[term.row] + p.t[term.col];
      if (w < 0) throw AdnError("adn: L term with s_i + t_j < 0 at " + detail::describe(term.row, term.col, term.mi));
      if (detail::order(term.mi) > w) {
        throw AdnError("adn: deg L_ij exceeds s_i + t_j at " + detail::describe(term.row, term.col, term.mi));
      }
    }
    for (const auto& term : p.B) {
      check_term(term, p.m, "B");
      const int w = p.r[term.row] + p.t[term.col];
      if (w < 0) throw AdnError("adn: B term with r_l + t_j < 0 at " + detail::describe(term.row, term.col, term.mi));
      if (detail::order(term.mi) > w) {
        throw AdnError("adn: deg B_lj exceeds r_l + t_j at " + detail::describe(term.row, term.col, term.mi));
      }
    }
  }

  const AdnProblem& problem() const { return p_; }

  MatPolyC L(const Point& x, const Point& xi, const Point& xi_prime) const {
    return assemble(p_.L, p_.M, x, xi, xi_prime, [&](const Term& t) { return p_.s[t.row] + p_.t[t.col]; });
  }
  MatPolyC B(const Point& x, const Point& xi, const Point& xi_prime) const {
    return assemble(p_.B, p_.m, x, xi, xi_prime, [&](const Term& t) { return p_.r[t.row] + p_.t[t.col]; });
  }
  /// Numeric principal symbol at a single xi.
  Eigen::MatrixXcd L_at(const Point& x, const Point& xi) const {
    return constant_part(L(x, xi, Point(p_.dim, 0.0)));
  }
  Eigen::MatrixXcd B_at(const Point& x, const Point& xi) const {
    return constant_part(B(x, xi, Point(p_.dim, 0.0)));
  }

 private:
  void check_term(const Term& t, int rows, const char* which) const {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= p_.M) {
      throw AdnError(std::string("adn: ") + which + " entry out of range at " + detail::describe(t.row, t.col, t.mi));
    }
    if (static_cast<int>(t.mi.size()) != p_.dim) {
      throw AdnError(std::string("adn: ") + which + " multi-index has wrong length at " +
                     detail::describe(t.row, t.col, t.mi));
    }
    for (int v : t.mi) {
      if (v < 0) throw AdnError(std::string("adn: negative multi-index at ") + detail::describe(t.row, t.col, t.mi));
    }
    if (!t.c) throw AdnError(std::string("adn: missing coefficient at ") + detail::describe(t.row, t.col, t.mi));
  }

  template <class Weight>
  MatPolyC assemble(const std::vector<Term>& terms, int rows, const Point& x, const Point& xi,
                    const Point& xi_prime, Weight weight) const {
    MatPolyC a(rows, p_.M);
    for (const auto& t : terms) {
      if (detail::order(t.mi) != weight(t)) continue;  // lower-order terms drop out
      PolyC mono(t.c(x));
      for (int d = 0; d < p_.dim; ++d) mono = mono * PolyC::affine(xi[d], xi_prime[d]).pow(t.mi[d]);
      a(t.row, t.col) += mono;
    }
    return a;
  }

  static Eigen::MatrixXcd constant_part(const MatPolyC& a) {
    Eigen::MatrixXcd out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i) {
      for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j)[0];
    }
    return out;
  }

  AdnProblem p_;
};

inline PrincipalParts principal_parts(const AdnProblem& p) { return PrincipalParts(p); }

struct Witness {
  Point x;
  Point xi;
  Point xi_prime;
  /// Offending coefficient vector (C_l for the complementing condition,
  /// roots or determinant value otherwise).
  std::vector<cplx> coefficients;
  std::string note;
};

struct ConditionVerdict {
  std::string name;
  bool pass = true;
  long samples = 0;
  std::optional<Witness> witness;
};

struct EllipticityResult {
  ConditionVerdict adn;      ///< (gamma): det L^p != 0
  ConditionVerdict uniform;  ///< C^-1 <= |det L^p| <= C on the unit sphere
  double det_min = 0.0;
  double det_max = 0.0;
  double constant = 0.0;
  int m_from_degree = 0;
};

/// Degree of sigma -> det L^p(x, sigma xi), i.e. the order 2m.
inline int determinant_degree(const PrincipalParts& pp, const Point& x, const Point& xi) {
  Point zero(xi.size(), 0.0);
  return pp.L(x, zero, xi).det().trimmed(1e-12).degree();
}

inline EllipticityResult check_ellipticity(const PrincipalParts& pp, const std::vector<Point>& x_samples,
                                           const std::vector<Point>& xi_samples) {
  if (x_samples.empty() || xi_samples.empty()) throw std::invalid_argument("check_ellipticity: empty samples");
  EllipticityResult res;
  res.adn.name = "adn_elliptic";
  res.uniform.name = "uniformly_elliptic";
  res.det_min = std::numeric_limits<double>::infinity();
  res.det_max = 0.0;
  for (const auto& x : x_samples) {
    for (const auto& xi : xi_samples) {
      const cplx d = pp.L_at(x, xi).determinant();
      const double a = std::abs(d);
      ++res.adn.samples;
      if (a < res.det_min) {
        res.det_min = a;
        if (a <= kDetTol && res.adn.pass) {
          res.adn.pass = false;
          res.adn.witness = Witness{x, xi, {}, {d}, "det L^p(x, xi) vanishes"};
        }
      }
      res.det_max = std::max(res.det_max, a);
    }
  }
  res.uniform.samples = res.adn.samples;
  res.uniform.pass = res.det_min > kDetTol && std::isfinite(res.det_max);
  res.constant = res.uniform.pass ? std::max(res.det_max, 1.0 / res.det_min) : std::numeric_limits<double>::infinity();
  if (!res.uniform.pass) {
    res.uniform.witness = res.adn.witness;
    if (res.uniform.witness) res.uniform.witness->note = "no lower bound: |det L^p| reaches 0 on the unit sphere";
  }
  res.m_from_degree = determinant_degree(pp, x_samples.front(), xi_samples.front()) / 2;
  return res;
}

/// Roots of sigma -> det L^p(x, xi + sigma xi') in the upper half plane.
inline std::vector<Root> roots_positive_imag(const PrincipalParts& pp, const Point& x, const Point& xi,
                                             const Point& xi_prime) {
  if (xi.size() != xi_prime.size()) throw std::invalid_argument("roots_positive_imag: dimension mismatch");
  if (xi.size() == 2 && std::abs(xi[0] * xi_prime[1] - xi[1] * xi_prime[0]) <=
                            1e-12 * std::hypot(xi[0], xi[1]) * std::hypot(xi_prime[0], xi_prime[1])) {
    throw std::invalid_argument("roots_positive_imag: xi and xi' are linearly dependent");
  }
  const auto all = roots(pp.L(x, xi, xi_prime).det());
  std::vector<Root> up;
  for (const auto& r : all) {
    if (std::abs(r.z.imag()) <= kImagTol * std::max(1.0, std::abs(r.z))) {
      std::ostringstream os;
      os << "roots_positive_imag: real root sigma=" << r.z.real() << " (degenerate pencil)";
      throw DegenerateRoot(os.str(), r.z);
    }
    if (r.z.imag() > 0.0) up.push_back(r);
  }
  return up;
}

inline int total_multiplicity(const std::vector<Root>& rs) {
  int n = 0;
  for (const auto& r : rs) n += r.multiplicity;
  return n;
}

struct ComplementingResult {
  bool pass = false;
  std::vector<Root> roots;
  PolyC m_plus;
  /// B^p(x, xi + sigma n) L'(x, xi + sigma n), m x M.
  std::optional<MatPolyC> product;
  /// Stacked remainder coefficients, m x (M m), before row normalization.
  Eigen::MatrixXcd remainders;
  double sv_ratio = 0.0;
  double division_residual = 0.0;
  std::optional<Witness> witness;
};

inline ComplementingResult complementing_check(const PrincipalParts& pp, const BoundaryPoint& bp,
                                               const Point& xi) {
  const auto& prob = pp.problem();
  double dot = 0.0, norm = 0.0;
  for (std::size_t d = 0; d < xi.size(); ++d) {
    dot += xi[d] * bp.n[d];
    norm += xi[d] * xi[d];
  }
  if (!(norm > 0.0)) throw std::invalid_argument("complementing_check: xi must be nonzero");
  if (std::abs(dot) > 1e-12 * std::sqrt(norm)) {
    throw std::invalid_argument("complementing_check: xi not orthogonal to n");
  }
  ComplementingResult res;
  try {
    res.roots = roots_positive_imag(pp, bp.x, xi, bp.n);
  } catch (const DegenerateRoot& e) {
    res.witness = Witness{bp.x, xi, bp.n, {e.root}, "real root of det L^p along xi + sigma n"};
    return res;
  }
  if (total_multiplicity(res.roots) != prob.m) {
    std::vector<cplx> zs;
    for (const auto& r : res.roots) zs.push_back(r.z);
    res.witness = Witness{bp.x, xi, bp.n, zs,
                          "expected " + std::to_string(prob.m) + " roots with Im > 0, found " +
                              std::to_string(total_multiplicity(res.roots))};
    return res;
  }
  res.m_plus = from_roots(res.roots);
  const MatPolyC adj = adjugate(pp.L(bp.x, xi, bp.n));
  res.product = pp.B(bp.x, xi, bp.n) * adj;
  const int m = prob.m, M = prob.M;
  res.remainders = Eigen::MatrixXcd::Zero(m, M * m);
  for (int l = 0; l < m; ++l) {
    for (int k = 0; k < M; ++k) {
      const auto dm = divmod((*res.product)(l, k), res.m_plus);
      res.division_residual = std::max(res.division_residual, dm.residual);
      for (int c = 0; c < m; ++c) res.remainders(l, k * m + c) = dm.remainder[c];
    }
  }
  // Row normalization makes the verdict invariant under row scaling.
  Eigen::MatrixXcd scaled = res.remainders;
  Eigen::VectorXd norms(m);
  for (int l = 0; l < m; ++l) {
    norms(l) = scaled.row(l).norm();
    if (norms(l) == 0.0) {
      std::vector<cplx> c(m, cplx(0.0));
      c[l] = 1.0;
      res.witness = Witness{bp.x, xi, bp.n, c, "row " + std::to_string(l + 1) + " vanishes modulo M+"};
      return res;
    }
    scaled.row(l) /= norms(l);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(scaled, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  res.sv_ratio = m > static_cast<int>(sv.size()) ? 0.0 : sv(m - 1) / sv(0);
  res.pass = res.sv_ratio >= kRankTol;
  if (!res.pass) {
    // C^T R = 0 for C = conj(u_min), mapped back to the unscaled rows.
    Eigen::VectorXcd c = svd.matrixU().col(m - 1).conjugate();
    for (int l = 0; l < m; ++l) c(l) /= norms(l);
    int big = 0;
    for (int l = 1; l < m; ++l) {
      if (std::abs(c(l)) > std::abs(c(big)) * (1.0 + 1e-9)) big = l;
    }
    c /= c(big);
    res.witness = Witness{bp.x, xi, bp.n, std::vector<cplx>(c.data(), c.data() + m),
                          "rows of B^p L' dependent modulo M+"};
  }
  return res;
}

struct AdnReport {
  std::string problem;
  ConditionVerdict adn;
  ConditionVerdict uniform;
  ConditionVerdict regular;
  ConditionVerdict complementing;
  double det_min = 0.0;
  double det_max = 0.0;
  double uniform_constant = 0.0;
  int m = 0;
  int m_from_degree = 0;
  int n_boundary_samples = 0;
  int n_xi_samples = 0;
  double max_division_residual = 0.0;
  double min_sv_ratio = 0.0;

  bool passed() const { return adn.pass && uniform.pass && regular.pass && complementing.pass; }
};

/// Scales c_k = (-1)^k 2^(k - n/2) for the boundary xi = c tau samples.
inline std::vector<double> xi_scales(int n) {
  std::vector<double> c(n);
  for (int k = 0; k < n; ++k) c[k] = (k % 2 ? -1.0 : 1.0) * std::ldexp(1.0, k - n / 2);
  return c;
}

/// Conditions (i)-(iv) on the samples: n_boundary angles on the circle,
/// n_xi unit directions for xi, and xi = c tau with n_xi scales at each
/// boundary point. Interior x samples are the center and the half-radius ring.
inline AdnReport check_all(const AdnProblem& problem, int n_boundary_samples = 32, int n_xi_samples = 8) {
  if (n_boundary_samples < 8 || n_xi_samples < 8) throw std::invalid_argument("check_all: sample counts must be >= 8");
  if (problem.dim != 2) throw std::invalid_argument("check_all: the built-in samplers are two-dimensional");
  const PrincipalParts pp(problem);
  AdnReport rep;
  rep.problem = problem.name;
  rep.m = problem.m;
  rep.n_boundary_samples = n_boundary_samples;
  rep.n_xi_samples = n_xi_samples;
  const auto boundary = problem.boundary ? problem.boundary : disk_boundary;

  std::vector<BoundaryPoint> bps;
  std::vector<Point> xs{{0.0, 0.0}};
  for (int k = 0; k < n_boundary_samples; ++k) {
    bps.push_back(boundary(kTwoPi * k / n_boundary_samples));
    xs.push_back(bps.back().x);
    xs.push_back({0.5 * bps.back().x[0], 0.5 * bps.back().x[1]});
  }
  std::vector<Point> dirs;
  for (int k = 0; k < n_xi_samples; ++k) {
    const double a = kTwoPi * k / n_xi_samples;
    dirs.push_back({std::cos(a), std::sin(a)});
  }

  const auto ell = check_ellipticity(pp, xs, dirs);
  rep.adn = ell.adn;
  rep.uniform = ell.uniform;
  rep.det_min = ell.det_min;
  rep.det_max = ell.det_max;
  rep.uniform_constant = ell.constant;
  rep.m_from_degree = ell.m_from_degree;

  rep.regular.name = "regular_elliptic";
  const double offsets[] = {kPi / 4, kPi / 2, 3 * kPi / 4};
  for (const auto& x : xs) {
    for (const auto& xi : dirs) {
      for (double off : offsets) {
        const double a = std::atan2(xi[1], xi[0]) + off;
        const Point xp{std::cos(a), std::sin(a)};
        ++rep.regular.samples;
        try {
          const auto up = roots_positive_imag(pp, x, xi, xp);
          if (total_multiplicity(up) != problem.m && rep.regular.pass) {
            std::vector<cplx> zs;
            for (const auto& r : up) zs.push_back(r.z);
            rep.regular.pass = false;
            rep.regular.witness = Witness{x, xi, xp, zs, "root count with Im > 0 differs from m"};
          }
        } catch (const DegenerateRoot& e) {
          if (rep.regular.pass) {
            rep.regular.pass = false;
            rep.regular.witness = Witness{x, xi, xp, {e.root}, "real root along the pencil"};
          }
        }
      }
    }
  }

  rep.complementing.name = "complementing";
  rep.min_sv_ratio = std::numeric_limits<double>::infinity();
  for (const auto& bp : bps) {
    for (double c : xi_scales(n_xi_samples)) {
      const Point xi{c * bp.tau[0], c * bp.tau[1]};
      const auto r = complementing_check(pp, bp, xi);
      ++rep.complementing.samples;
      rep.max_division_residual = std::max(rep.max_division_residual, r.division_residual);
      rep.min_sv_ratio = std::min(rep.min_sv_ratio, r.sv_ratio);
      if (!r.pass && rep.complementing.pass) {
        rep.complementing.pass = false;
        rep.complementing.witness = r.witness;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Built-in problems
// ---------------------------------------------------------------------------

namespace detail {
inline double angle_of(const Point& x) { return std::atan2(x[1], x[0]); }
inline Point normal_at(const Point& x) {
  const double r = std::hypot(x[0], x[1]);
  return {x[0] / r, x[1] / r};
}
inline Point tangent_at(const Point& x) {
  const auto n = normal_at(x);
  return {-n[1], n[0]};
}

inline void add_vector_laplacian(AdnProblem& p) {
  auto one = [](const Point&) { return 1.0; };
  for (int i = 0; i < 2; ++i) {
    p.L.push_back({i, i, {2, 0}, one});
    p.L.push_back({i, i, {0, 2}, one});
  }
}

/// Row l = n^T D^0.
inline void add_normal_row(AdnProblem& p, int l) {
  for (int j = 0; j < 2; ++j) p.B.push_back({l, j, {0, 0}, [j](const Point& x) { return normal_at(x)[j]; }});
}
}  // namespace detail

/// I_2 Delta with u.n = 0 and ((n.grad)u).tau + (alpha - kappa) u.tau = 0;
/// weights s = (0,0), t = (2,2), r = (-2,-1).
inline AdnProblem navier_laplacian_problem(const AlphaSpec& alpha, double kappa = 1.0) {
  AdnProblem p;
  p.name = "navier_laplacian";
  p.M = 2;
  p.m = 2;
  p.s = {0, 0};
  p.t = {2, 2};
  p.r = {-2, -1};
  p.boundary = disk_boundary;
  detail::add_vector_laplacian(p);
  detail::add_normal_row(p, 0);
  for (int j = 0; j < 2; ++j) {
    p.B.push_back({1, j, {0, 0}, [j, alpha, kappa](const Point& x) {
                     return (alpha(detail::angle_of(x)) - kappa) * detail::tangent_at(x)[j];
                   }});
    p.B.push_back({1, j, {1, 0}, [j](const Point& x) { return detail::normal_at(x)[0] * detail::tangent_at(x)[j]; }});
    p.B.push_back({1, j, {0, 1}, [j](const Point& x) { return detail::normal_at(x)[1] * detail::tangent_at(x)[j]; }});
  }
  return p;
}

/// Both boundary rows n^T D^0: fails the complementing condition.
inline AdnProblem duplicated_row_problem() {
  AdnProblem p;
  p.name = "duplicated_row";
  p.M = 2;
  p.m = 2;
  p.s = {0, 0};
  p.t = {2, 2};
  p.r = {-2, -2};
  p.boundary = disk_boundary;
  detail::add_vector_laplacian(p);
  detail::add_normal_row(p, 0);
  detail::add_normal_row(p, 1);
  return p;
}

/// diag(D^(2,0), D^(0,2)) with Dirichlet data: det = xi_1^2 xi_2^2.
inline AdnProblem diagonal_degenerate_problem() {
  AdnProblem p;
  p.name = "diagonal_degenerate";
  p.M = 2;
  p.m = 2;
  p.s = {0, 0};
  p.t = {2, 2};
  p.r = {-2, -2};
  p.boundary = disk_boundary;
  auto one = [](const Point&) { return 1.0; };
  p.L.push_back({0, 0, {2, 0}, one});
  p.L.push_back({1, 1, {0, 2}, one});
  p.B.push_back({0, 0, {0, 0}, one});
  p.B.push_back({1, 1, {0, 0}, one});
  return p;
}

/// I_2 Delta with u = g (B = I_2 D^0).
inline AdnProblem dirichlet_problem() {
  AdnProblem p;
  p.name = "dirichlet";
  p.M = 2;
  p.m = 2;
  p.s = {0, 0};
  p.t = {2, 2};
  p.r = {-2, -2};
  p.boundary = disk_boundary;
  detail::add_vector_laplacian(p);
  auto one = [](const Point&) { return 1.0; };
  p.B.push_back({0, 0, {0, 0}, one});
  p.B.push_back({1, 1, {0, 0}, one});
  return p;
}

}  // namespace navslip::adn
