#include "hdg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "hdg/assembly.hpp"
#include "hdg/geometry.hpp"
#include "hdg/parallel.hpp"
#include "hdg/quadrature.hpp"

namespace hdg {

namespace {

using Corners = std::array<Bary, 3>;

Bary combine(const Corners& c, const Bary& l) {
  Bary out{};
  for (int i = 0; i < 3; ++i) out[i] = l[0] * c[0][i] + l[1] * c[1][i] + l[2] * c[2][i];
  return out;
}

Bary midpoint(const Bary& a, const Bary& b) { return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])}; }

void apply_rule(const CellGeometry& g, const Corners& corners, double area_fraction, const TriangleRule& rule,
                const std::function<void(const Bary&, const Point&, double)>& fn) {
  for (int q = 0; q < rule.size(); ++q) {
    const Bary l = combine(corners, rule.points[q]);
    fn(l, g.map(l), 2.0 * g.area * area_fraction * rule.weights[q]);
  }
}

// corners[0] is the singular vertex.
void refine_toward(const CellGeometry& g, const Corners& corners, double area_fraction, int depth,
                   const TriangleRule& rule, const std::function<void(const Bary&, const Point&, double)>& fn) {
  if (depth == 0) {
    apply_rule(g, corners, area_fraction, rule, fn);
    return;
  }
  const Bary m01 = midpoint(corners[0], corners[1]);
  const Bary m02 = midpoint(corners[0], corners[2]);
  const Bary m12 = midpoint(corners[1], corners[2]);
  const double child = 0.25 * area_fraction;
  apply_rule(g, {m01, corners[1], m12}, child, rule, fn);
  apply_rule(g, {m02, m12, corners[2]}, child, rule, fn);
  apply_rule(g, {m01, m12, m02}, child, rule, fn);
  refine_toward(g, {corners[0], m01, m02}, child, depth - 1, rule, fn);
}

Vec2 value_at(const DofLayout& layout, const Eigen::VectorXd& u, int cell, const Eigen::VectorXd& phi) {
  const auto dofs = layout.entity_dofs(cell);
  const int n = layout.nodes_per_entity();
  Vec2 v = Vec2::Zero();
  for (int i = 0; i < n; ++i) {
    v.x() += phi(i) * u(dofs[i]);
    v.y() += phi(i) * u(dofs[n + i]);
  }
  return v;
}

Mat2 gradient_at(const DofLayout& layout, const Eigen::VectorXd& u, int cell,
                 const Eigen::Matrix<double, Eigen::Dynamic, 2>& G) {
  const auto dofs = layout.entity_dofs(cell);
  const int n = layout.nodes_per_entity();
  Mat2 m = Mat2::Zero();
  for (int i = 0; i < n; ++i) {
    m.row(0) += u(dofs[i]) * G.row(i);
    m.row(1) += u(dofs[n + i]) * G.row(i);
  }
  return m;
}

Vec2 facet_value(const DofLayout& layout, const Eigen::VectorXd& ubar, int face, double t) {
  const Eigen::VectorXd psi = segment_shape(layout.degree(), t);
  const auto dofs = layout.entity_dofs(face);
  const int n = layout.nodes_per_entity();
  Vec2 v = Vec2::Zero();
  for (int j = 0; j < n; ++j) {
    v.x() += psi(j) * ubar(dofs[j]);
    v.y() += psi(j) * ubar(dofs[n + j]);
  }
  return v;
}

double ordered_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

int singular_vertex(const CellGeometry& g, const std::vector<Point>& singular_points) {
  for (const Point& s : singular_points)
    for (int i = 0; i < 3; ++i)
      if ((g.x[i] - s).norm() <= 1e-12 * std::max(1.0, g.diameter)) return i;
  return -1;
}

void dense_guard(int n) {
  if (n > 2000)
    throw DenseGuardError("dense probe limited to 2000 unknowns, got " + std::to_string(n));
}

}  // namespace

void for_each_cell_point(const Mesh& mesh, int cell, const std::vector<Point>& singular_points,
                         const ErrorQuadrature& q, const std::function<void(const Bary&, const Point&, double)>& fn) {
  const CellGeometry g = cell_geometry(mesh, cell);
  const TriangleRule& rule = triangle_rule(q.base_degree);
  const int s = singular_vertex(g, singular_points);
  Corners corners{Bary{1, 0, 0}, Bary{0, 1, 0}, Bary{0, 0, 1}};
  if (s < 0 || q.singular_depth <= 0) {
    apply_rule(g, corners, 1.0, rule, fn);
    return;
  }
  const Corners rotated{corners[s], corners[(s + 1) % 3], corners[(s + 2) % 3]};
  refine_toward(g, rotated, 1.0, q.singular_depth, rule, fn);
}

Vec2 cell_velocity_value(const DofLayout& layout, const Eigen::VectorXd& u, int cell, const Bary& l) {
  return value_at(layout, u, cell, triangle_shape(layout.degree(), l));
}

Mat2 cell_velocity_gradient(const Mesh& mesh, const DofLayout& layout, const Eigen::VectorXd& u, int cell,
                            const Bary& l) {
  const CellGeometry g = cell_geometry(mesh, cell);
  return gradient_at(layout, u, cell, triangle_shape_grad(layout.degree(), l, g.grad_bary));
}

double facet_seminorm(const Mesh& mesh, const SpaceSet& spaces, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& ubar) {
  const int k = spaces.cfg.degree;
  const LineRule& line = gauss_line(k + 1);
  std::vector<double> part(mesh.num_cells(), 0.0);
  parallel_for(0, mesh.num_cells(), [&](int c) {
    double s = 0.0;
    for (int lf = 0; lf < 3; ++lf) {
      const int face = mesh.cell_faces(c)[lf].face;
      const double len = mesh.face(face).diameter;
      for (int q = 0; q < line.size(); ++q) {
        const double t = line.points[q];
        const Vec2 v = cell_velocity_value(spaces.cell_velocity, u, c, face_to_cell_bary(mesh, c, lf, t));
        const Vec2 vb = facet_value(spaces.facet_velocity, ubar, face, t);
        s += line.weights[q] * len * (v - vb).squaredNorm();
      }
    }
    part[c] = s / mesh.cell_diameter(c);
  });
  return std::sqrt(ordered_sum(part));
}

double energy_error(const ExactSolution& exact, const Mesh& mesh, const SpaceSet& spaces,
                    const DiscreteStokesSolution& sol, const ErrorQuadrature& q) {
  const auto singular = exact.singular_points();
  const int k = spaces.cfg.degree;
  std::vector<double> part(mesh.num_cells(), 0.0);
  parallel_for(0, mesh.num_cells(), [&](int c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const Point side = mesh.cell_centroid(c);
    double s = 0.0;
    for_each_cell_point(mesh, c, singular, q, [&](const Bary& l, const Point& x, double w) {
      const Mat2 gh = gradient_at(spaces.cell_velocity, sol.u, c, triangle_shape_grad(k, l, g.grad_bary));
      s += w * (exact.velocity_gradient(x, side) - gh).squaredNorm();
    });
    part[c] = s;
  });
  const double facet = facet_seminorm(mesh, spaces, sol.u, sol.ubar);
  return std::sqrt(ordered_sum(part) + facet * facet);
}

std::pair<double, double> l2_errors(const ExactSolution& exact, const Mesh& mesh, const SpaceSet& spaces,
                                    const DiscreteStokesSolution& sol, const ErrorQuadrature& q) {
  const auto singular = exact.singular_points();
  const int k = spaces.cfg.degree;
  const int nc = mesh.num_cells();
  auto ph_at = [&](int c, const Bary& l) {
    const Eigen::VectorXd psi = triangle_shape(k - 1, l);
    const auto dofs = spaces.cell_pressure.entity_dofs(c);
    double v = 0.0;
    for (int i = 0; i < psi.size(); ++i) v += psi(i) * sol.p(dofs[i]);
    return v;
  };

  // First pass: means of p and p_h.
  std::vector<double> ip(nc, 0.0), iph(nc, 0.0);
  parallel_for(0, nc, [&](int c) {
    const Point side = mesh.cell_centroid(c);
    double a = 0.0, b = 0.0;
    for_each_cell_point(mesh, c, singular, q, [&](const Bary& l, const Point& x, double w) {
      a += w * exact.pressure(x, side);
      b += w * ph_at(c, l);
    });
    ip[c] = a;
    iph[c] = b;
  });
  const double area = mesh.total_area();
  const double mean_p = ordered_sum(ip) / area;
  const double mean_ph = ordered_sum(iph) / area;

  std::vector<double> eu(nc, 0.0), ep(nc, 0.0);
  parallel_for(0, nc, [&](int c) {
    const Point side = mesh.cell_centroid(c);
    double su = 0.0, sp = 0.0;
    for_each_cell_point(mesh, c, singular, q, [&](const Bary& l, const Point& x, double w) {
      su += w * (exact.velocity(x, side) - cell_velocity_value(spaces.cell_velocity, sol.u, c, l)).squaredNorm();
      const double e = (exact.pressure(x, side) - mean_p) - (ph_at(c, l) - mean_ph);
      sp += w * e * e;
    });
    eu[c] = su;
    ep[c] = sp;
  });
  return {std::sqrt(ordered_sum(eu)), std::sqrt(ordered_sum(ep))};
}

std::pair<double, double> structure_checks(const Mesh& mesh, const SpaceSet& spaces, const Eigen::VectorXd& u) {
  const int k = spaces.cfg.degree;
  const DofLayout& layout = spaces.cell_velocity;
  double div_sup = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    // div u_h has degree k-1 <= 1: vertex values bound it.
    for (int i = 0; i < 3; ++i) {
      Bary l{0.0, 0.0, 0.0};
      l[i] = 1.0;
      const Mat2 G = gradient_at(layout, u, c, triangle_shape_grad(k, l, g.grad_bary));
      div_sup = std::max(div_sup, std::abs(G.trace()));
    }
  }
  double jump_sup = 0.0;
  const LineRule& line = gauss_line(k + 1);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (!face.is_interior()) continue;
    const auto [c1, l1] = face.parents[0];
    const auto [c2, l2] = face.parents[1];
    for (int q = 0; q < line.size(); ++q) {
      const double t = line.points[q];
      const Vec2 u1 = cell_velocity_value(layout, u, c1, face_to_cell_bary(mesh, c1, l1, t));
      const Vec2 u2 = cell_velocity_value(layout, u, c2, face_to_cell_bary(mesh, c2, l2, t));
      jump_sup = std::max(jump_sup, std::abs((u1 - u2).dot(face.normal)));
    }
  }
  return {div_sup, jump_sup};
}

double jump_seminorm(const Mesh& mesh, const DofLayout& layout, const Eigen::VectorXd& v) {
  const LineRule& line = gauss_line(layout.degree() + 1);
  double s = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    double sf = 0.0;
    for (int q = 0; q < line.size(); ++q) {
      const double t = line.points[q];
      const auto [c1, l1] = face.parents[0];
      Vec2 jump = cell_velocity_value(layout, v, c1, face_to_cell_bary(mesh, c1, l1, t));
      if (face.is_interior()) {
        const auto [c2, l2] = face.parents[1];
        jump -= cell_velocity_value(layout, v, c2, face_to_cell_bary(mesh, c2, l2, t));
      }
      sf += line.weights[q] * face.diameter * jump.squaredNorm();
    }
    s += sf / face.diameter;
  }
  return std::sqrt(s);
}

double gradient_jump_seminorm(const Mesh& mesh, const DofLayout& layout, const Eigen::VectorXd& t) {
  const int k = layout.degree();
  const LineRule& line = gauss_line(k + 1);
  double s = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (!face.is_interior()) continue;
    const auto [c1, l1] = face.parents[0];
    const auto [c2, l2] = face.parents[1];
    const CellGeometry g1 = cell_geometry(mesh, c1);
    const CellGeometry g2 = cell_geometry(mesh, c2);
    double sf = 0.0;
    for (int q = 0; q < line.size(); ++q) {
      const double tt = line.points[q];
      const Mat2 G1 = gradient_at(layout, t, c1, triangle_shape_grad(k, face_to_cell_bary(mesh, c1, l1, tt), g1.grad_bary));
      const Mat2 G2 = gradient_at(layout, t, c2, triangle_shape_grad(k, face_to_cell_bary(mesh, c2, l2, tt), g2.grad_bary));
      sf += line.weights[q] * face.diameter * ((G1 - G2) * face.normal).squaredNorm();
    }
    s += face.diameter * sf;
  }
  return std::sqrt(s);
}

double oscillation(const Mesh& mesh, const std::function<Vec2(const Point&)>& g, const ErrorQuadrature& q,
                   const std::vector<Point>& singular_points) {
  std::vector<double> part(mesh.num_cells(), 0.0);
  parallel_for(0, mesh.num_cells(), [&](int c) {
    double s = 0.0;
    for_each_cell_point(mesh, c, singular_points, q,
                        [&](const Bary&, const Point& x, double w) { s += w * g(x).squaredNorm(); });
    const double h = mesh.cell_diameter(c);
    part[c] = h * h * s;
  });
  return std::sqrt(ordered_sum(part));
}

ErrorReport compute_error_report(const ExactSolution& exact, const Mesh& mesh, const SpaceSet& spaces,
                                 const DiscreteStokesSolution& sol, const ErrorQuadrature& q) {
  ErrorReport r;
  const auto [eu, ep] = l2_errors(exact, mesh, spaces, sol, q);
  r.u_l2 = eu;
  r.p_l2 = ep;
  r.u_energy = energy_error(exact, mesh, spaces, sol, q);
  const auto [div, jump] = structure_checks(mesh, spaces, sol.u);
  r.div_sup = div;
  r.normal_jump_sup = jump;
  r.u_jump = jump_seminorm(mesh, spaces.cell_velocity, sol.u);
  r.u_grad_jump = gradient_jump_seminorm(mesh, spaces.cell_velocity, sol.u);
  r.osc_f = oscillation(mesh, [&exact](const Point& x) { return exact.body_force(x); }, q, exact.singular_points());
  r.u_max = sol.u.size() > 0 ? sol.u.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

std::vector<std::optional<double>> eoc(const std::vector<double>& errors) {
  std::vector<std::optional<double>> rates(errors.size());
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (errors[i - 1] > 0.0 && errors[i] > 0.0 && std::isfinite(errors[i - 1]) && std::isfinite(errors[i]))
      rates[i] = std::log2(errors[i - 1] / errors[i]);
  }
  return rates;
}

DiscreteOperators build_discrete_operators(const Mesh& mesh, const SpaceSet& spaces) {
  const MethodConfig& cfg = spaces.cfg;
  const int k = cfg.degree;
  const LocalSizes sz(k);
  const int nu = spaces.cell_velocity.num_dofs();
  std::vector<int> facet_free(spaces.facet_velocity.num_dofs(), -1);
  int nv = nu;
  for (int i = 0; i < spaces.facet_velocity.num_dofs(); ++i)
    if (!spaces.facet_velocity.is_constrained(i)) facet_free[i] = nv++;
  const int np = spaces.cell_pressure.num_dofs();
  const int nq = np + spaces.facet_pressure.num_dofs();

  std::vector<Eigen::Triplet<double>> ta, te, tb, tm;
  DiscreteOperators ops;
  ops.pressure_mean = Eigen::VectorXd::Zero(nq);
  const LineRule& line = gauss_line(k + 1);
  const TriangleRule& tri = triangle_rule(2 * k);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const LocalA parts = local_a_parts(mesh, c, k);
    const Eigen::MatrixXd a = parts.total(cfg.alpha);
    const Eigen::MatrixXd e = parts.volume + parts.penalty;
    const Eigen::MatrixXd b = local_b(mesh, c, k);
    const Eigen::VectorXd mean = local_pressure_mean(mesh, c, k);
    const CellDofMap map = cell_dof_map(mesh, spaces, c);
    std::vector<int> vel(sz.velocity(), -1), pres(sz.pressure());
    for (int i = 0; i < sz.cell_velocity; ++i) vel[i] = map.u[i];
    for (int i = 0; i < sz.facet_velocity; ++i) vel[sz.cell_velocity + i] = facet_free[map.ubar[i]];
    for (int i = 0; i < sz.cell_pressure; ++i) pres[i] = map.p[i];
    for (int i = 0; i < sz.facet_pressure; ++i) pres[sz.cell_pressure + i] = np + map.pbar[i];

    for (int i = 0; i < sz.velocity(); ++i) {
      if (vel[i] < 0) continue;
      for (int j = 0; j < sz.velocity(); ++j) {
        if (vel[j] < 0) continue;
        ta.emplace_back(vel[i], vel[j], a(i, j));
        te.emplace_back(vel[i], vel[j], e(i, j));
      }
      for (int r = 0; r < sz.pressure(); ++r)
        if (b(r, i) != 0.0) tb.emplace_back(pres[r], vel[i], b(r, i));
    }
    for (int r = 0; r < sz.cell_pressure; ++r) ops.pressure_mean(pres[r]) += mean(r);

    // |||q|||_p^2 = |q|^2 + sum_K h_K |qbar|^2_dK
    const CellGeometry g = cell_geometry(mesh, c);
    for (int q = 0; q < tri.size(); ++q) {
      const Eigen::VectorXd psi = triangle_shape(k - 1, tri.points[q]);
      const double w = 2.0 * g.area * tri.weights[q];
      for (int r = 0; r < sz.cell_pressure; ++r)
        for (int s = 0; s < sz.cell_pressure; ++s) tm.emplace_back(pres[r], pres[s], w * psi(r) * psi(s));
    }
    const int nf = segment_dim(k);
    for (int lf = 0; lf < 3; ++lf) {
      const double len = mesh.face(mesh.cell_faces(c)[lf].face).diameter;
      for (int q = 0; q < line.size(); ++q) {
        const Eigen::VectorXd psi = segment_shape(k, line.points[q]);
        const double w = g.diameter * line.weights[q] * len;
        for (int r = 0; r < nf; ++r)
          for (int s = 0; s < nf; ++s)
            tm.emplace_back(pres[sz.cell_pressure + lf * nf + r], pres[sz.cell_pressure + lf * nf + s],
                            w * psi(r) * psi(s));
      }
    }
  }
  ops.a.resize(nv, nv);
  ops.a.setFromTriplets(ta.begin(), ta.end());
  ops.energy.resize(nv, nv);
  ops.energy.setFromTriplets(te.begin(), te.end());
  ops.b.resize(nq, nv);
  ops.b.setFromTriplets(tb.begin(), tb.end());
  ops.pressure_norm.resize(nq, nq);
  ops.pressure_norm.setFromTriplets(tm.begin(), tm.end());
  return ops;
}

double inf_sup_probe(const Mesh& mesh, const SpaceSet& spaces) {
  const int total = spaces.cell_velocity.num_dofs() + spaces.facet_velocity.num_free() +
                    spaces.cell_pressure.num_dofs() + spaces.facet_pressure.num_dofs();
  dense_guard(total);
  const DiscreteOperators ops = build_discrete_operators(mesh, spaces);
  const Eigen::MatrixXd Mv(ops.energy);
  const Eigen::MatrixXd B(ops.b);
  const Eigen::MatrixXd Mp(ops.pressure_norm);
  const Eigen::LLT<Eigen::MatrixXd> llt(Mv);
  if (llt.info() != Eigen::Success) throw std::runtime_error("velocity energy Gram matrix is not SPD");
  const Eigen::MatrixXd Y = llt.matrixL().solve(B.transpose());
  const Eigen::MatrixXd S = Y.transpose() * Y;

  const int nq = static_cast<int>(B.rows());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(ops.pressure_mean);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(nq, nq);
  const Eigen::MatrixXd Z = Q.rightCols(nq - 1);
  const Eigen::MatrixXd Sz = Z.transpose() * S * Z;
  const Eigen::MatrixXd Mz = Z.transpose() * Mp * Z;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(Sz, Mz, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw std::runtime_error("inf-sup eigenproblem failed");
  return std::sqrt(std::max(0.0, eig.eigenvalues().minCoeff()));
}

CoercivitySample sample_coercivity(const Mesh& mesh, const SpaceSet& spaces, int samples, std::uint64_t seed) {
  const DiscreteOperators ops = build_discrete_operators(mesh, spaces);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CoercivitySample out;
  out.samples = samples;
  out.seed = seed;
  out.min_quotient = std::numeric_limits<double>::infinity();
  out.max_quotient = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd v(ops.a.rows());
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < v.size(); ++i) v(i) = normal(rng);
    const double q = v.dot(ops.a * v) / v.dot(ops.energy * v);
    out.min_quotient = std::min(out.min_quotient, q);
    out.max_quotient = std::max(out.max_quotient, q);
  }
  return out;
}

double coercivity_constant(const Mesh& mesh, const SpaceSet& spaces) {
  dense_guard(spaces.cell_velocity.num_dofs() + spaces.facet_velocity.num_free());
  const DiscreteOperators ops = build_discrete_operators(mesh, spaces);
  const Eigen::MatrixXd A(ops.a);
  const Eigen::MatrixXd M(ops.energy);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, M, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw std::runtime_error("coercivity eigenproblem failed");
  return eig.eigenvalues().minCoeff();
}

}  // namespace hdg
