#include <cmath>

#include <gtest/gtest.h>

#include <hdg/cases.hpp>
#include <hdg/solver.hpp>

using namespace hdg;

namespace {

double max_coeff_diff(const DiscreteStokesSolution& a, const DiscreteStokesSolution& b) {
  double d = (a.u - b.u).cwiseAbs().maxCoeff();
  d = std::max(d, (a.ubar - b.ubar).cwiseAbs().maxCoeff());
  d = std::max(d, (a.p - b.p).cwiseAbs().maxCoeff());
  return std::max(d, (a.pbar - b.pbar).cwiseAbs().maxCoeff());
}

double pressure_mean(const Mesh& mesh, const SpaceSet& s, const DiscreteStokesSolution& sol) {
  double m = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto w = local_pressure_mean(mesh, c, s.cfg.degree);
    const auto dofs = s.cell_pressure.entity_dofs(c);
    for (int i = 0; i < w.size(); ++i) m += w(i) * sol.p(dofs[i]);
  }
  return m;
}

}  // namespace

TEST(Solver, DirectSolveSmall) {
  Eigen::SparseMatrix<double> A(3, 3);
  A.insert(0, 0) = 2;
  A.insert(1, 1) = -1;
  A.insert(0, 2) = 1;
  A.insert(2, 0) = 1;
  const Eigen::VectorXd b = Eigen::Vector3d(1, 2, 3);
  const Eigen::VectorXd x = sparse_direct_solve(A, b);
  EXPECT_LT((A * x - b).norm(), 1e-14);

  Eigen::SparseMatrix<double> S(2, 2);
  S.insert(0, 0) = 1;
  EXPECT_THROW(sparse_direct_solve(S, Eigen::Vector2d(1, 1)), SolverError);
}

TEST(Solver, ZeroDataZeroSolution) {
  const Mesh m = lshape_mesh(2);
  for (Method method : {Method::HDG, Method::EDG_HDG, Method::EDG}) {
    const SpaceSet s = build_spaces(m, MethodConfig::make(method, 1));
    const Eigen::VectorXd bc = Eigen::VectorXd::Zero(s.facet_velocity.num_dofs());
    const auto full = solve_full(assemble(m, s, {}, bc));
    const auto cond = solve_condensed(m, s, {}, bc);
    for (const auto* sol : {&full, &cond}) {
      EXPECT_EQ(sol->u.cwiseAbs().maxCoeff(), 0.0);
      EXPECT_EQ(sol->p.cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(Solver, PatchReproducedByFullSolve) {
  const LinearPatchSolution exact;
  const Mesh m = cracked_square_mesh(4);
  for (Method method : {Method::HDG, Method::EDG_HDG, Method::EDG}) {
    const SpaceSet s = build_spaces(m, MethodConfig::make(method, 1));
    const Eigen::VectorXd bc = case_boundary_data(exact, m, s);
    const auto sol = solve_full(assemble(m, s, {}, bc));
    const auto nodal = interpolate_facet_dirichlet(exact, m, s.facet_velocity);
    EXPECT_LT((sol.ubar - nodal).cwiseAbs().maxCoeff(), 1e-10);
    for (int c = 0; c < m.num_cells(); ++c) {
      const auto dofs = s.cell_velocity.entity_dofs(c);
      const auto P = m.cell_points(c);
      for (int i = 0; i < 3; ++i) {
        const Vec2 u = exact.velocity(P[i]);
        EXPECT_NEAR(sol.u(dofs[i]), u.x(), 1e-10);
        EXPECT_NEAR(sol.u(dofs[3 + i]), u.y(), 1e-10);
      }
    }
    EXPECT_LT(sol.p.cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Solver, Linearity) {
  const Mesh m = unit_square_mesh(3);
  const SpaceSet s = build_spaces(m, MethodConfig::make(Method::EDG_HDG, 2));
  const Eigen::VectorXd bc = Eigen::VectorXd::Zero(s.facet_velocity.num_dofs());
  const BodyForce f = [](const Point& x) { return Vec2(std::sin(3 * x.y()), x.x() * x.x()); };
  const BodyForce f2 = [&f](const Point& x) { return Vec2(2.0 * f(x)); };
  const auto a = solve_full(assemble(m, s, f, bc));
  const auto b = solve_full(assemble(m, s, f2, bc));
  EXPECT_LT((2.0 * a.u - b.u).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((2.0 * a.p - b.p).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Solver, CondensedUnknownCounts) {
  const Mesh m = unit_square_mesh(2);
  const SpaceSet hdg = build_spaces(m, MethodConfig::make(Method::HDG, 1));
  const SpaceSet edg_hdg = build_spaces(m, MethodConfig::make(Method::EDG_HDG, 1));
  EXPECT_EQ(hdg.cell_velocity.num_dofs(), 48);
  EXPECT_EQ(hdg.cell_pressure.num_dofs(), 8);
  // 32 free facet velocities plus 2 x 16 facet pressures, one of which is pinned.
  EXPECT_EQ(condensed_unknowns(hdg), 32 + 31);
  const int full = full_system_index(hdg).reduced_size();
  EXPECT_EQ(full, 48 + 32 + 8 + 32 + 1);
  EXPECT_LT(condensed_unknowns(hdg), full);
  EXPECT_LT(condensed_unknowns(edg_hdg), condensed_unknowns(hdg));
  EXPECT_LT(condensed_unknowns(build_spaces(m, MethodConfig::make(Method::EDG, 1))), condensed_unknowns(edg_hdg));
}

TEST(Solver, CondensedMatchesFull) {
  for (int k : {1, 2}) {
    for (CaseId id : {CaseId::SquareMinReg, CaseId::LShape, CaseId::CrackedSquare}) {
      const CaseDefinition def = make_case(id);
      const ExactSolution& exact = *def.exact;
      const Mesh m = def.mesh(def.base_n_for(k));
      const BodyForce f = [&exact](const Point& x) { return exact.body_force(x); };
      for (Method method : {Method::HDG, Method::EDG_HDG, Method::EDG}) {
        const SpaceSet s = build_spaces(m, MethodConfig::make(method, k));
        const Eigen::VectorXd bc = case_boundary_data(exact, m, s);
        const auto full = solve_full(assemble(m, s, f, bc));
        const auto cond = solve_condensed(m, s, f, bc);
        EXPECT_LE(max_coeff_diff(full, cond), 1e-10) << to_string(id) << ' ' << to_string(method) << " k=" << k;
        EXPECT_LT(std::abs(full.multiplier), 1e-10);
        EXPECT_LE(std::abs(pressure_mean(m, s, cond)), 1e-12);
        EXPECT_LE(std::abs(pressure_mean(m, s, full)), 1e-12);
        for (int i = 0; i < bc.size(); ++i)
          if (s.facet_velocity.is_constrained(i)) EXPECT_EQ(cond.ubar(i), bc(i));
        EXPECT_LT(cond.global_unknowns, full.global_unknowns);
      }
    }
  }
}

TEST(Solver, GradientForcingLeavesVelocityUnchanged) {
  const Mesh m = lshape_mesh(2);
  const BodyForce f = [](const Point& x) { return Vec2(3 * x.x() * x.x(), 3 * x.y() * x.y()); };
  const LShapeSolution exact(1.0);
  for (Method method : {Method::HDG, Method::EDG_HDG}) {
    Eigen::VectorXd ref;
    for (double nu : {1.0, 1e-5}) {
      const SpaceSet s = build_spaces(m, MethodConfig::make(method, 1, std::nullopt, nu));
      const auto sol = solve_condensed(m, s, f, case_boundary_data(exact, m, s));
      Eigen::VectorXd v(sol.u.size() + sol.ubar.size());
      v << sol.u, sol.ubar;
      if (ref.size() == 0) {
        ref = v;
        continue;
      }
      EXPECT_LE((v - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff(), 1e-8) << to_string(method);
    }
  }
}
