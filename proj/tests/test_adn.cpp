#include "navslip/adn/adn.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace navslip;
using namespace navslip::adn;

namespace {

PolyC random_poly(std::mt19937_64& rng, int degree) {
  std::normal_distribution<double> nd;
  std::vector<cplx> c(degree + 1);
  for (auto& v : c) v = cplx(nd(rng), nd(rng));
  return PolyC(c);
}

double max_diff(const PolyC& a, const PolyC& b) { return (a - b).max_abs_coeff(); }

AlphaSpec one_plus_cos() { return AlphaSpec::fourier({{0, 1.0, 0.0}, {1, 1.0, 0.0}}); }

}  // namespace

TEST(PolyC, CanonicalFormAndArithmetic) {
  EXPECT_TRUE(PolyC(std::vector<cplx>{0.0, 0.0}).is_zero());
  EXPECT_EQ(PolyC(std::vector<cplx>{0.0, 0.0}).degree(), -1);
  const PolyC p({1.0, 2.0, 0.0});
  EXPECT_EQ(p.degree(), 1);
  const PolyC sq = PolyC::affine(1.0, 1.0).pow(2);  // 1 + 2s + s^2
  EXPECT_EQ(sq[0], cplx(1.0));
  EXPECT_EQ(sq[1], cplx(2.0));
  EXPECT_EQ(sq[2], cplx(1.0));
  EXPECT_EQ(sq(cplx(0.0, 1.0)), cplx(0.0, 2.0));
  EXPECT_TRUE((sq - sq).is_zero());
}

TEST(PolyC, DivisionInvariant) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_poly(rng, 6);
    const auto d = random_poly(rng, 1 + trial % 4);
    const auto dm = divmod(a, d);
    EXPECT_LT(dm.remainder.degree(), d.degree());
    const double scale = std::max({1.0, a.max_abs_coeff(), dm.quotient.max_abs_coeff() * d.max_abs_coeff()});
    EXPECT_LE(dm.residual, 1e-12 * scale);
  }
}

TEST(PolyC, DoubleRootRecognized) {
  for (double s : {1.0, 2.0, 8.0, 0.125, 64.0}) {
    const PolyC p = PolyC({cplx(s * s), 0.0, 1.0}).pow(2);  // (sigma^2 + s^2)^2
    const auto rs = roots(p);
    ASSERT_EQ(rs.size(), 2u) << "s=" << s;
    for (const auto& r : rs) {
      EXPECT_EQ(r.multiplicity, 2);
      EXPECT_NEAR(std::abs(r.z), s, 1e-12 * s);
      EXPECT_NEAR(r.z.real(), 0.0, 1e-12 * s);
    }
  }
}

TEST(PolyC, SimpleRootsOfRandomPolynomials) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_poly(rng, 5);
    const auto rs = roots(p);
    EXPECT_EQ(total_multiplicity(rs), 5);
    for (const auto& r : rs) EXPECT_LE(std::abs(p(r.z)), 1e-10 * p.max_abs_coeff());
  }
}

TEST(Adjugate, Examples) {
  MatPolyC a(2, 2);
  const PolyC q({4.0, 0.0, 1.0});  // |xi|^2 + sigma^2 with |xi| = 2
  a(0, 0) = q;
  a(1, 1) = q;
  const auto adj = adjugate(a);
  EXPECT_EQ(max_diff(adj(0, 0), q), 0.0);
  EXPECT_EQ(max_diff(adj(1, 1), q), 0.0);
  EXPECT_TRUE(adj(0, 1).is_zero());
  EXPECT_TRUE(adj(1, 0).is_zero());

  MatPolyC one(1, 1);
  one(0, 0) = PolyC(std::vector<cplx>{3.0, 5.0});
  EXPECT_EQ(max_diff(adjugate(one)(0, 0), PolyC(1.0)), 0.0);
}

TEST(Adjugate, IdentityOnRandomMatrices) {
  std::mt19937_64 rng(5);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 10; ++trial) {
      MatPolyC a(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = random_poly(rng, 2);
      }
      const auto prod = a * adjugate(a);
      const auto det = a.det();
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const PolyC expect = i == j ? det : PolyC{};
          EXPECT_LE(max_diff(prod(i, j), expect), 1e-12 * std::max(1.0, det.max_abs_coeff()));
        }
      }
    }
  }
}

TEST(PrincipalParts, LaplacianSymbol) {
  const PrincipalParts pp(navier_laplacian_problem(AlphaSpec::constant(0.0)));
  const Point x{1.0, 0.0};
  const auto l = pp.L_at(x, {0.6, -1.3});
  EXPECT_NEAR(std::abs(l(0, 0) - (0.36 + 1.69)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(l(1, 1) - (0.36 + 1.69)), 0.0, 1e-14);
  EXPECT_EQ(l(0, 1), cplx(0.0));
  EXPECT_EQ(l(1, 0), cplx(0.0));
}

TEST(PrincipalParts, NavierBoundaryIndependentOfAlpha) {
  const PrincipalParts a(navier_laplacian_problem(AlphaSpec::constant(0.0)));
  const PrincipalParts b(navier_laplacian_problem(AlphaSpec::constant(5.0)));
  const auto bp = disk_boundary(0.7);
  const Point xi{0.3, -0.4};
  EXPECT_LE((a.B_at(bp.x, xi) - b.B_at(bp.x, xi)).norm(), 1e-15);
  // Row 2 principal part: (n . xi) tau^T.
  const auto bm = a.B_at(bp.x, xi);
  const double nxi = bp.n[0] * xi[0] + bp.n[1] * xi[1];
  EXPECT_NEAR(std::abs(bm(1, 0) - nxi * bp.tau[0]), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(bm(1, 1) - nxi * bp.tau[1]), 0.0, 1e-14);
}

TEST(PrincipalParts, WeightViolationNamesTerm) {
  auto p = navier_laplacian_problem(AlphaSpec::constant(0.0));
  p.B.push_back({0, 1, {1, 0}, [](const Point&) { return 1.0; }});  // r_1 + t_2 = 0
  try {
    PrincipalParts pp(p);
    FAIL();
  } catch (const AdnError& e) {
    const std::string w = e.what();
    EXPECT_NE(w.find("i=1"), std::string::npos) << w;
    EXPECT_NE(w.find("j=2"), std::string::npos) << w;
    EXPECT_NE(w.find("[1,0]"), std::string::npos) << w;
  }
  auto q = navier_laplacian_problem(AlphaSpec::constant(0.0));
  q.r = {-2};
  EXPECT_THROW(PrincipalParts{q}, AdnError);
}

TEST(Ellipticity, LaplacianConstants) {
  const PrincipalParts pp(navier_laplacian_problem(AlphaSpec::constant(0.0)));
  std::vector<Point> xs{{0.0, 0.0}, {0.5, 0.5}}, dirs;
  for (int k = 0; k < 16; ++k) dirs.push_back({std::cos(0.4 * k), std::sin(0.4 * k)});
  const auto r = check_ellipticity(pp, xs, dirs);
  EXPECT_TRUE(r.adn.pass);
  EXPECT_TRUE(r.uniform.pass);
  EXPECT_NEAR(r.det_min, 1.0, 1e-14);
  EXPECT_NEAR(r.det_max, 1.0, 1e-14);
  EXPECT_EQ(r.m_from_degree, 2);
}

TEST(Ellipticity, ScalingChangesConstantsOnly) {
  std::vector<Point> xs{{0.0, 0.0}}, dirs;
  for (int k = 0; k < 8; ++k) dirs.push_back({std::cos(0.7 * k), std::sin(0.7 * k)});
  auto one_row = navier_laplacian_problem(AlphaSpec::constant(0.0));
  auto both = one_row;
  for (auto& t : one_row.L) {
    if (t.row == 0) t.c = [](const Point&) { return 3.0; };
  }
  for (auto& t : both.L) t.c = [](const Point&) { return 3.0; };
  const auto a = check_ellipticity(PrincipalParts(one_row), xs, dirs);
  const auto b = check_ellipticity(PrincipalParts(both), xs, dirs);
  EXPECT_TRUE(a.adn.pass && b.adn.pass);
  EXPECT_NEAR(a.det_min, 3.0, 1e-13);
  EXPECT_NEAR(a.det_max, 3.0, 1e-13);
  EXPECT_NEAR(b.det_min, 9.0, 1e-13);
  EXPECT_NEAR(b.det_max, 9.0, 1e-13);
}

TEST(Ellipticity, DiagonalControlFailsWithWitness) {
  const PrincipalParts pp(diagonal_degenerate_problem());
  const auto r = check_ellipticity(pp, {{0.0, 0.0}}, {{1.0, 0.0}, {0.6, 0.8}});
  EXPECT_FALSE(r.adn.pass);
  ASSERT_TRUE(r.adn.witness.has_value());
  EXPECT_EQ(r.adn.witness->xi, (Point{1.0, 0.0}));
  EXPECT_FALSE(r.uniform.pass);
}

TEST(Roots, PositiveImaginaryExamples) {
  const PrincipalParts pp(navier_laplacian_problem(AlphaSpec::constant(0.0)));
  const Point x{1.0, 0.0};
  struct Case {
    Point xi, xp;
    cplx expect;
  };
  for (const auto& c : {Case{{1.0, 0.0}, {0.0, 1.0}, cplx(0.0, 1.0)}, Case{{2.0, 0.0}, {0.0, 1.0}, cplx(0.0, 2.0)},
                        Case{{1.0, 0.0}, {1.0, 1.0}, cplx(-0.5, 0.5)}}) {
    const auto up = roots_positive_imag(pp, x, c.xi, c.xp);
    ASSERT_EQ(up.size(), 1u);
    EXPECT_EQ(up[0].multiplicity, 2);
    EXPECT_LE(std::abs(up[0].z - c.expect), 1e-9);
    // Independent check: the closed form is a root of |xi + sigma xi'|^2.
    const double dot = c.xi[0] * c.xp[0] + c.xi[1] * c.xp[1];
    const double a = c.xi[0] * c.xi[0] + c.xi[1] * c.xi[1];
    const double b = c.xp[0] * c.xp[0] + c.xp[1] * c.xp[1];
    const cplx z = c.expect;
    EXPECT_LE(std::abs(a + 2.0 * dot * z + b * z * z), 1e-14);
  }
}

TEST(Roots, DegenerateAndDependentPencils) {
  const PrincipalParts lap(navier_laplacian_problem(AlphaSpec::constant(0.0)));
  EXPECT_THROW(roots_positive_imag(lap, {0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}), std::invalid_argument);
  const PrincipalParts diag(diagonal_degenerate_problem());
  EXPECT_THROW(roots_positive_imag(diag, {0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}), DegenerateRoot);
}

TEST(Complementing, NavierPassesWithProductIdentity) {
  for (const auto& alpha : {AlphaSpec::constant(0.0), AlphaSpec::constant(5.0), one_plus_cos()}) {
    const PrincipalParts pp(navier_laplacian_problem(alpha));
    for (int k = 0; k < 32; ++k) {
      const auto bp = disk_boundary(kTwoPi * k / 32);
      for (double c : xi_scales(8)) {
        const Point xi{c * bp.tau[0], c * bp.tau[1]};
        const auto r = complementing_check(pp, bp, xi);
        ASSERT_TRUE(r.pass);
        ASSERT_EQ(r.roots.size(), 1u);
        EXPECT_LE(std::abs(r.roots[0].z - cplx(0.0, std::abs(c))), 1e-9);
        // (sigma^2 + |xi|^2) (n^T ; sigma tau^T)
        const PolyC q({c * c, 0.0, 1.0});
        const PolyC sigma(std::vector<cplx>{0.0, 1.0});
        double worst = 0.0;
        for (int j = 0; j < 2; ++j) {
          worst = std::max(worst, max_diff((*r.product)(0, j), cplx(bp.n[j]) * q));
          worst = std::max(worst, max_diff((*r.product)(1, j), cplx(bp.tau[j]) * (sigma * q)));
        }
        EXPECT_LE(worst, 1e-12);
        EXPECT_LE(r.division_residual, 1e-12);
      }
    }
  }
}

// sigma^2 + |xi|^2 = (sigma - i|xi|)^2 + 2i|xi| (sigma - i|xi|), so each
// diagonal entry leaves 2|xi|^2 + 2i|xi| sigma.
TEST(Complementing, DirichletRemainderOracle) {
  const PrincipalParts pp(dirichlet_problem());
  const auto bp = disk_boundary(1.1);
  for (double s : {0.5, 1.0, 3.0}) {
    const auto r = complementing_check(pp, bp, {s * bp.tau[0], s * bp.tau[1]});
    EXPECT_TRUE(r.pass);
    Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(2, 4);
    expect(0, 0) = 2.0 * s * s;
    expect(0, 1) = cplx(0.0, 2.0 * s);
    expect(1, 2) = 2.0 * s * s;
    expect(1, 3) = cplx(0.0, 2.0 * s);
    EXPECT_LE((r.remainders - expect).norm(), 1e-12 * s * s);
  }
}

TEST(Complementing, DuplicatedRowsWitness) {
  const PrincipalParts pp(duplicated_row_problem());
  const auto bp = disk_boundary(0.3);
  const auto r = complementing_check(pp, bp, {bp.tau[0], bp.tau[1]});
  EXPECT_FALSE(r.pass);
  ASSERT_TRUE(r.witness.has_value());
  ASSERT_EQ(r.witness->coefficients.size(), 2u);
  EXPECT_LE(std::abs(r.witness->coefficients[0] - cplx(1.0)), 1e-9);
  EXPECT_LE(std::abs(r.witness->coefficients[1] - cplx(-1.0)), 1e-9);
}

TEST(Complementing, RowScalingInvariant) {
  auto p = navier_laplacian_problem(AlphaSpec::constant(1.0));
  for (auto& t : p.B) {
    if (t.row == 1) {
      auto f = t.c;
      t.c = [f](const Point& x) { return 1e-6 * f(x); };
    }
  }
  auto d = duplicated_row_problem();
  for (auto& t : d.B) {
    if (t.row == 0) {
      auto f = t.c;
      t.c = [f](const Point& x) { return 250.0 * f(x); };
    }
  }
  const auto bp = disk_boundary(2.0);
  const Point xi{bp.tau[0], bp.tau[1]};
  EXPECT_TRUE(complementing_check(PrincipalParts(p), bp, xi).pass);
  EXPECT_FALSE(complementing_check(PrincipalParts(d), bp, xi).pass);
}

TEST(Complementing, Preconditions) {
  const PrincipalParts pp(navier_laplacian_problem(AlphaSpec::constant(0.0)));
  const auto bp = disk_boundary(0.0);
  EXPECT_THROW(complementing_check(pp, bp, {0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(complementing_check(pp, bp, {1.0, 1.0}), std::invalid_argument);
}

TEST(CheckAll, NavierLaplacianElliptic) {
  for (const auto& alpha : {AlphaSpec::constant(0.0), AlphaSpec::constant(5.0), one_plus_cos()}) {
    const auto rep = check_all(navier_laplacian_problem(alpha), 32, 8);
    EXPECT_TRUE(rep.adn.pass);
    EXPECT_TRUE(rep.uniform.pass);
    EXPECT_TRUE(rep.regular.pass);
    EXPECT_TRUE(rep.complementing.pass);
    EXPECT_EQ(rep.complementing.samples, 32 * 8);
    EXPECT_EQ(rep.m_from_degree, 2);
    EXPECT_LE(rep.max_division_residual, 1e-12);
  }
}

TEST(CheckAll, Controls) {
  const auto dup = check_all(duplicated_row_problem(), 8, 8);
  EXPECT_TRUE(dup.adn.pass && dup.uniform.pass && dup.regular.pass);
  EXPECT_FALSE(dup.complementing.pass);
  EXPECT_TRUE(dup.complementing.witness.has_value());

  const auto diag = check_all(diagonal_degenerate_problem(), 8, 8);
  EXPECT_FALSE(diag.adn.pass);
  ASSERT_TRUE(diag.adn.witness.has_value());
  EXPECT_EQ(diag.adn.witness->xi, (Point{1.0, 0.0}));

  EXPECT_TRUE(check_all(dirichlet_problem(), 16, 8).passed());
  EXPECT_THROW(check_all(dirichlet_problem(), 4, 8), std::invalid_argument);
}
