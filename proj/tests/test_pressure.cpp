#include "navslip/biot_savart.hpp"
#include "navslip/ns_solver.hpp"
#include "navslip/pressure.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace navslip;

namespace {

VectorField rigid(const PolarGrid& g, double c) {
  return VectorField::from_polar(g, [c](double r, double) { return std::pair{0.0, c * r}; }, true);
}

ScalarField constant(const PolarGrid& g, double v) {
  auto f = ScalarField::from_function(g, [v](double, double) { return v; }, true);
  return f;
}

}  // namespace

TEST(Pressure, RigidRotationClosedForm) {
  const auto g = build_grid(64, 64);
  const auto trace = boundary_trace(g, AlphaSpec::constant(0.0));
  for (double c : {1.0, -0.7}) {
    for (double nu : {0.0, 0.3}) {
      const auto ps = recover_pressure(rigid(g, c), constant(g, 2.0 * c), nu, trace);
      for (int j = 0; j < g.n_r(); ++j) {
        for (int k = 0; k < g.n_theta(); ++k) {
          EXPECT_NEAR(ps.p(j, k), c * c * (g.r(j) * g.r(j) / 2.0 - 0.25), 1e-10);
        }
      }
      EXPECT_LT(std::abs(ps.mean), 1e-12);
      EXPECT_NEAR(pressure_estimate_slack(ps.p, rigid(g, c), constant(g, 2.0 * c), nu), 0.0, 1e-10);
    }
  }
}

TEST(Pressure, ZeroVelocityZeroPressure) {
  const auto g = build_grid(16, 16);
  const auto trace = boundary_trace(g, AlphaSpec::constant(0.0));
  const auto ps = recover_pressure(VectorField(g), ScalarField(g), 0.1, trace);
  EXPECT_EQ(max_abs(ps.p.values), 0.0);
  EXPECT_EQ(pressure_estimate_slack(ps.p, VectorField(g), ScalarField(g), 0.1), 0.0);
}

TEST(Pressure, SampledNavierFieldResidualAndSlack) {
  const auto g = build_grid(64, 64);
  const auto trace = boundary_trace(g, AlphaSpec::constant(1.0));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = sample_navier(seed, 1.0, g);
    const auto u = perp_grad(s.psi);
    const auto w = curl(u);
    for (double nu : {0.0, 0.01}) {
      const auto ps = recover_pressure(u, w, nu, trace);
      const auto est = pressure_estimate(ps.p, u, w, nu);
      EXPECT_LE(ps.poisson_residual, 1e-6 * std::max(1.0, est.rhs));
      EXPECT_GE(est.slack, -1e-6 * est.rhs) << "seed " << seed;
      EXPECT_LT(std::abs(ps.mean), 1e-10);
    }
  }
}

TEST(Pressure, NeumannConditionConverges) {
  double prev = 0.0;
  for (int n : {32, 64}) {
    const auto g = build_grid(n, 32);
    const auto s = sample_navier(3, 1.0, g);
    const auto u = perp_grad(s.psi);
    const auto ps = recover_pressure(u, curl(u), 0.01, boundary_trace(g, AlphaSpec::constant(1.0)));
    if (prev > 0.0) EXPECT_GE(std::log2(prev / ps.neumann_residual), 1.0);
    prev = ps.neumann_residual;
  }
}

TEST(Pressure, GaugeShiftAbsorbed) {
  const auto g = build_grid(32, 32);
  const auto s = sample_navier(4, 1.0, g);
  const auto u = perp_grad(s.psi);
  const auto w = curl(u);
  const auto trace = boundary_trace(g, AlphaSpec::constant(1.0));
  const auto a = recover_pressure(u, w, 0.05, trace);
  PressureOptions opt;
  opt.data_shift = 5e-7;
  const auto b = recover_pressure(u, w, 0.05, trace, opt);
  EXPECT_NEAR(b.compatibility_defect, 5e-7, 1e-12);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(a.p.values[i], b.p.values[i], 1e-11);
}

TEST(Pressure, IncompatibleDataRejected) {
  const auto g = build_grid(32, 32);
  const auto u = rigid(g, 1.0);
  PressureOptions opt;
  opt.data_shift = 1e-3;
  try {
    recover_pressure(u, constant(g, 2.0), 0.1, boundary_trace(g, AlphaSpec::constant(0.0)), opt);
    FAIL() << "expected PressureError";
  } catch (const PressureError& e) {
    EXPECT_NE(std::string(e.what()).find("defect"), std::string::npos);
  }
}

TEST(Pressure, RejectsNonTangentOrDivergentInput) {
  const auto g = build_grid(32, 32);
  const auto trace = boundary_trace(g, AlphaSpec::constant(0.0));
  const auto translation =
      VectorField::from_cartesian(g, [](double, double) { return std::pair{1.0, 0.0}; }, true);
  EXPECT_THROW(recover_pressure(translation, ScalarField(g), 0.1, trace), std::invalid_argument);
  const auto source =
      VectorField::from_polar(g, [](double r, double) { return std::pair{r * (1 - r * r), 0.0}; }, true);
  EXPECT_THROW(recover_pressure(source, ScalarField(g), 0.1, trace), std::invalid_argument);
  auto bad = rigid(g, 1.0);
  bad.ut[3] = std::nan("");
  EXPECT_THROW(recover_pressure(bad, ScalarField(g), 0.1, trace), std::invalid_argument);
}

TEST(Pressure, SolverSnapshotsSatisfyEstimate) {
  SimConfig c;
  c.nu = 0.01;
  c.n_r = 32;
  c.n_theta = 32;
  c.t_end = 0.3;
  c.output_stride = 0;
  c.output_interval = 0.1;
  c.alpha = AlphaSpec::constant(1.0);
  c.initial = InitialCondition::bump({0.3, 0.0}, 0.5, 5.0);
  const auto traj = simulate(c);
  const auto trace = boundary_trace(build_grid(32, 32), c.alpha);
  for (const auto& snap : traj.snapshots) {
    const auto ps = recover_pressure(snap.u, snap.omega, c.nu, trace);
    const auto est = pressure_estimate(ps.p, snap.u, snap.omega, c.nu);
    EXPECT_GE(est.slack, -1e-6 * est.rhs) << "t=" << snap.t;
  }
}
