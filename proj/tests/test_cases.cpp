#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <hdg/cases.hpp>

#include "fd_checks.hpp"

using namespace hdg;

namespace {

constexpr double kPi = std::numbers::pi;
using fd::polar;
using fd::samples;

}  // namespace

TEST(Cases, FiniteDifferenceResiduals) {
  for (const auto& s : fd::scenarios())
    for (const Point& x : s.points) {
      const fd::Residuals r = fd::residuals(*s.exact, x);
      EXPECT_LE(r.gradient, 1e-6) << s.exact->name() << " at " << x.transpose();
      EXPECT_LE(r.divergence, 1e-6) << s.exact->name() << " at " << x.transpose();
      EXPECT_LE(r.momentum, 1e-4) << s.exact->name() << " at " << x.transpose();
      const Mat2 g = s.exact->velocity_gradient(x);
      EXPECT_LE(std::abs(g.trace()), 1e-12 * std::max(1.0, g.norm()));
    }
}

TEST(Cases, ProfileDerivatives) {
  const CornerProfile psi;
  EXPECT_NEAR(psi.exponent(), 0.54448, 1e-5);
  EXPECT_DOUBLE_EQ(psi.opening_angle(), 1.5 * kPi);
  EXPECT_NEAR(psi.derivative(0, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(psi.derivative(1, 0.0), 0.0, 1e-15);
  // The exponent is a rounded root of the corner eigenvalue equation.
  EXPECT_NEAR(psi.derivative(0, psi.opening_angle()), 0.0, 1e-5);
  EXPECT_NEAR(psi.derivative(1, psi.opening_angle()), 0.0, 1e-5);
  const double h = 1e-5;
  for (double t : {0.3, 1.7, 3.9}) {
    for (int m = 0; m < 3; ++m) {
      const double fd = (psi.derivative(m, t + h) - psi.derivative(m, t - h)) / (2 * h);
      EXPECT_NEAR(fd, psi.derivative(m + 1, t), 1e-8);
    }
  }
}

TEST(Cases, LShapeWallsNoSlip) {
  const LShapeSolution e(1.0);
  for (double r : {0.1, 0.5, 1.0}) {
    EXPECT_LE(e.velocity(polar(r, 0.0)).norm(), 1e-5);
    EXPECT_LE(e.velocity(polar(r, 1.5 * kPi)).norm(), 1e-5);
  }
}

TEST(Cases, PointValues) {
  const LShapeSolution e(1.0);
  const Vec2 f = e.body_force({1.0, 1.0});
  EXPECT_EQ(f, Vec2(3.0, 3.0));
  const CornerSingularSolution c("square-mr");
  EXPECT_NEAR(c.pressure(polar(1.0, kPi / 2)), -3.0 * std::sqrt(2.0), 1e-14);
  EXPECT_EQ(c.velocity(Point::Zero()), Vec2::Zero());
  EXPECT_TRUE(std::isnan(c.pressure(Point::Zero())));
  EXPECT_TRUE(e.helmholtz_projection_is_zero());
  EXPECT_EQ(c.body_force({0.3, 0.4}), Vec2::Zero());
  // Pressure scales with the viscosity apart from the cubic part.
  const LShapeSolution small(1e-5);
  const Point x(-0.3, 0.4);
  EXPECT_NEAR(small.pressure(x) - (x.x() * x.x() * x.x() + x.y() * x.y() * x.y()), 1e-5 * e.singular_pressure(x, x), 1e-15);
}

TEST(Cases, StreamFunction) {
  const CornerSingularSolution c("crack");
  const double h = 1e-6;
  for (const Point& x : samples(0.02, 0.09, 0.2, 2 * kPi - 0.2)) {
    const double dy = (c.stream_function(x + Point(0, h), x) - c.stream_function(x - Point(0, h), x)) / (2 * h);
    const double dx = (c.stream_function(x + Point(h, 0), x) - c.stream_function(x - Point(h, 0), x)) / (2 * h);
    EXPECT_LE((Vec2(dy, -dx) - c.velocity(x)).norm(), 1e-7);
  }
}

TEST(Cases, CrackTraces) {
  const CornerSingularSolution c("crack");
  for (double r : {0.01, 0.05, 0.1}) {
    const Point x(r, 0.0);
    EXPECT_EQ(polar_angle(x, {r, 0.01}), 0.0);
    EXPECT_DOUBLE_EQ(polar_angle(x, {r, -0.01}), 2 * kPi);
    EXPECT_LE(c.velocity(x, {r, 0.01}).norm(), 1e-15);
    EXPECT_LE(c.velocity(x, {r, -0.01}).norm(), 1e-14);
    EXPECT_NEAR(c.pressure(x, {r, 0.01}), -6 / std::sqrt(r), 1e-12);
    EXPECT_NEAR(c.pressure(x, {r, -0.01}), 6 / std::sqrt(r), 1e-12);
  }
  // Continuous across the negative x-axis.
  EXPECT_LE((c.velocity(polar(0.05, kPi - 1e-12)) - c.velocity(polar(0.05, kPi + 1e-12))).norm(), 1e-10);
}

TEST(Cases, NamesAndValidation) {
  for (CaseId id : {CaseId::SquareMinReg, CaseId::LShape, CaseId::CrackedSquare})
    EXPECT_EQ(parse_case(to_string(id)), id);
  EXPECT_FALSE(parse_case("cube"));
  EXPECT_THROW(LShapeSolution(0.0), std::invalid_argument);
  EXPECT_THROW(LShapeSolution(-1.0), std::invalid_argument);
  EXPECT_NEAR(make_case(CaseId::LShape).mesh(1).total_area(), 3.0, 1e-14);
  EXPECT_NEAR(make_case(CaseId::CrackedSquare).mesh(2).total_area(), 0.04, 1e-15);
  EXPECT_EQ(case_square_min_reg().base_n_for(2), 4);
}

TEST(Cases, MeanLastTwo) {
  EXPECT_FALSE(mean_last_two({std::nullopt, 1.0}));
  EXPECT_DOUBLE_EQ(*mean_last_two({std::nullopt, 1.0, 2.0, 4.0}), 3.0);
}

TEST(Cases, ConvergenceDriver) {
  int calls = 0;
  const auto report = run_convergence(case_lshape(1.0), MethodConfig::make(Method::EDG_HDG, 1), 3, 1,
                                      [&](int level, const Mesh& m, const SpaceSet&, const DiscreteStokesSolution&) {
                                        EXPECT_EQ(level, calls++);
                                        EXPECT_EQ(m.num_cells(), 6 << (2 * level));
                                      });
  EXPECT_EQ(calls, 3);
  ASSERT_EQ(report.levels.size(), 3u);
  EXPECT_FALSE(report.rate_u_l2[0]);
  EXPECT_TRUE(report.rate_u_l2[2]);
  EXPECT_NEAR(report.levels[1].h * 2, report.levels[0].h, 1e-14);
  EXPECT_EQ(report.case_name, "lshape");
  EXPECT_THROW(run_convergence(case_lshape(1.0), MethodConfig::make(Method::HDG, 1), 0), std::invalid_argument);
}

TEST(Cases, RobustnessDriver) {
  const RobustnessReport r = run_pressure_robustness(2, 1, 1);
  ASSERT_EQ(r.runs.size(), 4u);
  EXPECT_EQ(r.runs[0].method, Method::EDG);
  EXPECT_EQ(r.runs[1].nu, 1e-5);
  EXPECT_EQ(r.runs[2].method, Method::EDG_HDG);
  EXPECT_LE(r.max_velocity_difference, 1e-8);
  EXPECT_GT(r.runs[1].report.levels[0].errors.u_energy, 10 * r.runs[3].report.levels[0].errors.u_energy);
}
