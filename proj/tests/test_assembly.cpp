#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include <hdg/assembly.hpp>
#include <hdg/cases.hpp>
#include <hdg/parallel.hpp>
#include <hdg/solver.hpp>

#include "poly_oracle.hpp"

using namespace hdg;
using oracle::Poly2;

namespace {

struct OracleLocal {
  Eigen::MatrixXd volume, penalty, consistency, b;
};

/// Local a_h pieces and b_h by exact polynomial integration.
OracleLocal exact_local(const Mesh& mesh, int cell, int k) {
  const auto P = mesh.cell_points(cell);
  const std::array<oracle::Pt, 3> v{{{P[0].x(), P[0].y()}, {P[1].x(), P[1].y()}, {P[2].x(), P[2].y()}}};
  const auto phi = oracle::lagrange_triangle(k, v);
  const auto psi = oracle::lagrange_triangle(k - 1, v);
  const auto mu = oracle::lagrange_segment(k);
  const int nk = static_cast<int>(phi.size()), nf = static_cast<int>(mu.size()), np = static_cast<int>(psi.size());
  const int cv = 2 * nk, nv = cv + 6 * nf;

  OracleLocal o;
  o.volume = Eigen::MatrixXd::Zero(nv, nv);
  o.penalty = o.volume;
  o.consistency = o.volume;
  o.b = Eigen::MatrixXd::Zero(np + 3 * nf, nv);

  const Poly2 X = Poly2::linear(v[0][0], v[1][0] - v[0][0], v[2][0] - v[0][0]);
  const Poly2 Y = Poly2::linear(v[0][1], v[1][1] - v[0][1], v[2][1] - v[0][1]);
  const double jac = 2.0 * mesh.cell_area(cell);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < nk; ++i) {
      for (int j = 0; j < nk; ++j) {
        const Poly2 g = phi[i].dx() * phi[j].dx() + phi[i].dy() * phi[j].dy();
        o.volume(c * nk + i, c * nk + j) = jac * g.compose(X, Y).integrate_reference_triangle();
      }
      const Poly2 d = c == 0 ? phi[i].dx() : phi[i].dy();
      for (int r = 0; r < np; ++r)
        o.b(r, c * nk + i) = -jac * (psi[r] * d).compose(X, Y).integrate_reference_triangle();
    }

  const double h = mesh.cell_diameter(cell);
  for (int lf = 0; lf < 3; ++lf) {
    const int face = mesh.cell_faces(cell)[lf].face;
    const auto [a, b] = mesh.face_points(face);
    const double len = (b - a).norm();
    const Point n = mesh.outward_normal(cell, lf);
    const Poly2 Xs = Poly2::linear(a.x(), b.x() - a.x(), 0.0), Ys = Poly2::linear(a.y(), b.y() - a.y(), 0.0);
    // jump[c][I], dn[c][I] as polynomials in s
    std::vector<std::vector<Poly2>> jump(2, std::vector<Poly2>(nv)), dn(2, std::vector<Poly2>(nv));
    for (int c = 0; c < 2; ++c) {
      for (int i = 0; i < nk; ++i) {
        jump[c][c * nk + i] = phi[i].compose(Xs, Ys);
        dn[c][c * nk + i] = (phi[i].dx() * n.x() + phi[i].dy() * n.y()).compose(Xs, Ys);
      }
      for (int j = 0; j < nf; ++j) jump[c][cv + lf * 2 * nf + c * nf + j] = mu[j] * -1.0;
    }
    for (int I = 0; I < nv; ++I) {
      for (int J = 0; J < nv; ++J) {
        double pen = 0.0, con = 0.0;
        for (int c = 0; c < 2; ++c) {
          pen += (jump[c][I] * jump[c][J]).integrate_unit_interval();
          con += (jump[c][I] * dn[c][J] + dn[c][I] * jump[c][J]).integrate_unit_interval();
        }
        o.penalty(I, J) += len / h * pen;
        o.consistency(I, J) -= len * con;
      }
      for (int r = 0; r < nf; ++r) {
        const Poly2 flux = jump[0][I] * n.x() + jump[1][I] * n.y();
        o.b(np + lf * nf + r, I) += len * (mu[r] * flux).integrate_unit_interval();
      }
    }
  }
  return o;
}

double max_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

Mesh reference_triangle() { return Mesh::from_cells({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}); }

/// Local velocity vector of a field: cell nodal values and facet nodal values.
template <class F>
Eigen::VectorXd local_field(const Mesh& mesh, int cell, int k, F field) {
  const LocalSizes sz(k);
  const int nk = triangle_dim(k), nf = segment_dim(k);
  Eigen::VectorXd v(sz.velocity());
  const auto P = mesh.cell_points(cell);
  for (int i = 0; i < nk; ++i) {
    const Bary l = triangle_node(k, i);
    const Vec2 u = field(l[0] * P[0] + l[1] * P[1] + l[2] * P[2]);
    v(i) = u.x();
    v(nk + i) = u.y();
  }
  for (int lf = 0; lf < 3; ++lf) {
    const auto [a, b] = mesh.face_points(mesh.cell_faces(cell)[lf].face);
    for (int j = 0; j < nf; ++j) {
      const double t = segment_node(k, j);
      const Vec2 u = field((1 - t) * a + t * b);
      v(sz.cell_velocity + lf * 2 * nf + j) = u.x();
      v(sz.cell_velocity + lf * 2 * nf + nf + j) = u.y();
    }
  }
  return v;
}

}  // namespace

TEST(Assembly, ExactPolynomialOracle) {
  for (int k : {1, 2}) {
    double worst = 0.0;
    for (const Mesh& m : {reference_triangle(), unit_square_mesh(2), lshape_mesh(1), cracked_square_mesh(4)}) {
      for (int c = 0; c < m.num_cells(); ++c) {
        const OracleLocal o = exact_local(m, c, k);
        const LocalA parts = local_a_parts(m, c, k);
        // Scale by the entry magnitude of each block so small cells are not favoured.
        const double s = std::max(1.0, o.penalty.cwiseAbs().maxCoeff());
        worst = std::max({worst, max_diff(parts.volume, o.volume) / s, max_diff(parts.penalty, o.penalty) / s,
                          max_diff(parts.consistency, o.consistency) / s, max_diff(local_b(m, c, k), o.b)});
      }
    }
    EXPECT_LT(worst, 1e-12) << "k=" << k;
  }
}

TEST(Assembly, ReferenceTriangleK1Alpha6) {
  const Mesh m = reference_triangle();
  const OracleLocal o = exact_local(m, 0, 1);
  const Eigen::MatrixXd A = local_a(m, 0, MethodConfig::make(Method::HDG, 1, 6.0));
  EXPECT_LT(max_diff(A, o.volume + 6.0 * o.penalty + o.consistency), 1e-12);
  EXPECT_LT(max_diff(A, A.transpose()), 1e-14);
}

TEST(Assembly, ConstantsInNullspace) {
  const Mesh m = lshape_mesh(1);
  for (int k : {1, 2})
    for (int c = 0; c < m.num_cells(); ++c) {
      const Eigen::MatrixXd A = local_a(m, c, MethodConfig::make(Method::HDG, k));
      const Eigen::VectorXd v = local_field(m, c, k, [](const Point&) { return Vec2(0.7, -1.3); });
      EXPECT_LT((A * v).norm(), 1e-12);
    }
}

TEST(Assembly, PenaltyLinearInAlpha) {
  const Mesh m = unit_square_mesh(1);
  const LocalA parts = local_a_parts(m, 1, 2);
  const Eigen::MatrixXd A1 = local_a(m, 1, MethodConfig::make(Method::HDG, 2, 5.0));
  const Eigen::MatrixXd A2 = local_a(m, 1, MethodConfig::make(Method::HDG, 2, 10.0));
  EXPECT_LT(max_diff(A2 - A1, 5.0 * parts.penalty), 1e-12);
}

TEST(Assembly, DivergenceTerms) {
  const Mesh m = reference_triangle();
  const Eigen::MatrixXd B = local_b(m, 0, 1);
  const int cv = LocalSizes(1).cell_velocity;
  auto cell_part = [&](auto field) {
    Eigen::VectorXd v = local_field(m, 0, 1, field);
    v.tail(v.size() - cv).setZero();
    return v;
  };
  // q = 1 row of the cell pressure block.
  EXPECT_NEAR(B.row(0).dot(cell_part([](const Point& x) { return Vec2(x.y(), x.x()); })), 0.0, 1e-15);
  EXPECT_NEAR(B.row(0).dot(cell_part([](const Point& x) { return Vec2(x.x(), x.y()); })), -1.0, 1e-14);

  // Facet term with v = (1, 0) and vbar = 0: per-face values n_x |F|, summing to zero.
  const Eigen::VectorXd v = cell_part([](const Point&) { return Vec2(1.0, 0.0); });
  const Eigen::VectorXd facet = B.bottomRows(6) * v;
  double total = 0.0;
  for (int lf = 0; lf < 3; ++lf) {
    const double face_value = facet(2 * lf) + facet(2 * lf + 1);
    const Face& f = m.face(m.cell_faces(0)[lf].face);
    EXPECT_NEAR(face_value, f.diameter * m.outward_normal(0, lf).x(), 1e-14);
    total += face_value;
  }
  EXPECT_NEAR(total, 0.0, 1e-14);
}

TEST(Assembly, SymmetricSystem) {
  const Mesh m = cracked_square_mesh(4);
  for (Method method : {Method::HDG, Method::EDG_HDG, Method::EDG}) {
    const SpaceSet s = build_spaces(m, MethodConfig::make(method, 2));
    const SaddleSystem sys = assemble(m, s, {}, Eigen::VectorXd::Zero(s.facet_velocity.num_dofs()));
    const Eigen::SparseMatrix<double> d = sys.matrix - Eigen::SparseMatrix<double>(sys.matrix.transpose());
    const double asym = d.nonZeros() ? d.coeffs().cwiseAbs().maxCoeff() : 0.0;
    EXPECT_LE(asym, 1e-14);
    EXPECT_EQ(sys.index.reduced_size(), sys.matrix.rows());
  }
}

TEST(Assembly, MeanRowAndViscosityScaling) {
  const Mesh m = unit_square_mesh(3);
  const SpaceSet s1 = build_spaces(m, MethodConfig::make(Method::HDG, 1, std::nullopt, 1.0));
  const SpaceSet s2 = build_spaces(m, MethodConfig::make(Method::HDG, 1, std::nullopt, 0.25));
  const Eigen::VectorXd bc = Eigen::VectorXd::Zero(s1.facet_velocity.num_dofs());
  const SaddleSystem a = assemble(m, s1, {}, bc), b = assemble(m, s2, {}, bc);
  EXPECT_NEAR(a.pressure_mean.sum(), 1.0, 1e-14);
  const int nu_ = a.index.n_u;
  const Eigen::MatrixXd A = Eigen::MatrixXd(a.matrix).topLeftCorner(nu_, nu_);
  const Eigen::MatrixXd B = Eigen::MatrixXd(b.matrix).topLeftCorner(nu_, nu_);
  EXPECT_LT(max_diff(0.25 * A, B), 1e-13);
}

TEST(Assembly, RejectsBadBoundaryData) {
  const Mesh m = unit_square_mesh(2);
  const SpaceSet s = build_spaces(m, MethodConfig::make(Method::HDG, 1));
  EXPECT_THROW(assemble(m, s, {}, Eigen::VectorXd::Zero(3)), AssemblyError);
  const Eigen::VectorXd outflow =
      interpolate_facet_field([](const Point& x, const Point&) { return Vec2(x.x(), x.y()); }, m, s.facet_velocity);
  EXPECT_THROW(assemble(m, s, {}, outflow), AssemblyError);
  Eigen::VectorXd nan = Eigen::VectorXd::Zero(s.facet_velocity.num_dofs());
  for (int i = 0; i < nan.size(); ++i)
    if (s.facet_velocity.is_constrained(i)) {
      nan(i) = std::nan("");
      break;
    }
  EXPECT_THROW(assemble(m, s, {}, nan), AssemblyError);
  const BodyForce bad = [](const Point&) { return Vec2(std::nan(""), 0.0); };
  EXPECT_THROW(assemble(m, s, bad, Eigen::VectorXd::Zero(s.facet_velocity.num_dofs())), AssemblyError);
}

TEST(Assembly, FluxBalancing) {
  const Mesh m = lshape_mesh(2);
  const SpaceSet s = build_spaces(m, MethodConfig::make(Method::EDG_HDG, 2));
  Eigen::VectorXd g =
      interpolate_facet_field([](const Point& x, const Point&) { return Vec2(1 + x.x(), x.y() * x.y()); }, m,
                              s.facet_velocity);
  const double before = boundary_flux(m, s.facet_velocity, g);
  EXPECT_GT(std::abs(before), 1.0);
  EXPECT_NEAR(balance_boundary_flux(m, s.facet_velocity, g), before, 1e-13);
  EXPECT_LT(std::abs(boundary_flux(m, s.facet_velocity, g)), 1e-13);
}

TEST(Assembly, CellOrderInvariance) {
  const Mesh m = lshape_mesh(2);
  auto cells = m.cells();
  std::reverse(cells.begin(), cells.end());
  const Mesh r = Mesh::from_cells(m.vertices(), cells);
  auto sorted_values = [](const Mesh& mesh) {
    const SpaceSet s = build_spaces(mesh, MethodConfig::make(Method::HDG, 1));
    const SaddleSystem sys = assemble(mesh, s, {}, Eigen::VectorXd::Zero(s.facet_velocity.num_dofs()));
    std::vector<double> v;
    for (int k = 0; k < sys.matrix.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sys.matrix, k); it; ++it)
        if (it.value() != 0.0) v.push_back(it.value());
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto a = sorted_values(m), b = sorted_values(r);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-13);
}

TEST(Assembly, ParallelMatchesSerial) {
  const Mesh m = refine_uniform(cracked_square_mesh(4));
  const CornerSingularSolution exact("crack");
  const SpaceSet s = build_spaces(m, MethodConfig::make(Method::EDG_HDG, 2));
  const Eigen::VectorXd bc = case_boundary_data(exact, m, s);
  set_worker_threads(1);
  const SaddleSystem serial = assemble(m, s, {}, bc);
  set_worker_threads(3);
  const SaddleSystem threaded = assemble(m, s, {}, bc);
  set_worker_threads(0);
  const Eigen::SparseMatrix<double> d = serial.matrix - threaded.matrix;
  EXPECT_LE(d.nonZeros() ? d.coeffs().cwiseAbs().maxCoeff() : 0.0, 1e-12);
  EXPECT_LE((serial.rhs - threaded.rhs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Assembly, MatrixDump) {
  Eigen::SparseMatrix<double> m(2, 2);
  m.insert(1, 0) = 0.5;
  std::ostringstream os;
  write_matrix_coordinates(os, m);
  EXPECT_EQ(os.str(), "1 0 0.5\n");
}
