#include "hdg/assembly.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "hdg/geometry.hpp"
#include "hdg/parallel.hpp"
#include "hdg/quadrature.hpp"

namespace hdg {

namespace {

// Gauss points for products of degree-k traces: ceil((2k+1)/2) + 1.
int face_points(int degree) { return (2 * degree + 2) / 2 + 1; }

constexpr int kBatch = 4096;

}  // namespace

LocalSizes::LocalSizes(int degree)
    : cell_velocity(2 * triangle_dim(degree)),
      facet_velocity(3 * 2 * segment_dim(degree)),
      cell_pressure(triangle_dim(degree - 1)),
      facet_pressure(3 * segment_dim(degree)) {}

LocalA local_a_parts(const Mesh& mesh, int cell, int degree) {
  const LocalSizes sz(degree);
  const int nk = triangle_dim(degree);
  const int nf = segment_dim(degree);
  const int n = sz.velocity();
  const CellGeometry g = cell_geometry(mesh, cell);

  LocalA out;
  out.volume = Eigen::MatrixXd::Zero(n, n);
  out.penalty = Eigen::MatrixXd::Zero(n, n);
  out.consistency = Eigen::MatrixXd::Zero(n, n);

  const TriangleRule& vol = triangle_rule(2 * degree);
  for (int q = 0; q < vol.size(); ++q) {
    const auto G = triangle_shape_grad(degree, vol.points[q], g.grad_bary);
    const Eigen::MatrixXd GG = (2.0 * g.area * vol.weights[q]) * (G * G.transpose());
    for (int c = 0; c < 2; ++c) out.volume.block(c * nk, c * nk, nk, nk) += GG;
  }

  const LineRule& line = gauss_line(face_points(degree));
  Eigen::MatrixXd J(2, n), D(2, n);
  for (int lf = 0; lf < 3; ++lf) {
    const int face = mesh.cell_faces(cell)[lf].face;
    const double len = mesh.face(face).diameter;
    const Point nK = mesh.outward_normal(cell, lf);
    const int off = sz.cell_velocity + lf * 2 * nf;
    for (int q = 0; q < line.size(); ++q) {
      const double t = line.points[q];
      const Bary l = face_to_cell_bary(mesh, cell, lf, t);
      const Eigen::VectorXd phi = triangle_shape(degree, l);
      const auto G = triangle_shape_grad(degree, l, g.grad_bary);
      const Eigen::VectorXd dn = G * nK;
      const Eigen::VectorXd psi = segment_shape(degree, t);
      J.setZero();
      D.setZero();
      for (int c = 0; c < 2; ++c) {
        J.block(c, c * nk, 1, nk) = phi.transpose();
        J.block(c, off + c * nf, 1, nf) = -psi.transpose();
        D.block(c, c * nk, 1, nk) = dn.transpose();
      }
      const double w = line.weights[q] * len;
      out.penalty.noalias() += (w / g.diameter) * (J.transpose() * J);
      out.consistency.noalias() -= w * (J.transpose() * D + D.transpose() * J);
    }
  }
  return out;
}

Eigen::MatrixXd local_a(const Mesh& mesh, int cell, const MethodConfig& cfg) {
  return local_a_parts(mesh, cell, cfg.degree).total(cfg.alpha);
}

Eigen::MatrixXd local_b(const Mesh& mesh, int cell, int degree) {
  const LocalSizes sz(degree);
  const int nk = triangle_dim(degree);
  const int nf = segment_dim(degree);
  const int np = sz.cell_pressure;
  const CellGeometry g = cell_geometry(mesh, cell);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(sz.pressure(), sz.velocity());

  const TriangleRule& vol = triangle_rule(2 * degree);
  for (int q = 0; q < vol.size(); ++q) {
    const auto G = triangle_shape_grad(degree, vol.points[q], g.grad_bary);
    const Eigen::VectorXd psi = triangle_shape(degree - 1, vol.points[q]);
    const double w = 2.0 * g.area * vol.weights[q];
    for (int c = 0; c < 2; ++c) B.block(0, c * nk, np, nk).noalias() -= w * psi * G.col(c).transpose();
  }

  const LineRule& line = gauss_line(face_points(degree));
  for (int lf = 0; lf < 3; ++lf) {
    const int face = mesh.cell_faces(cell)[lf].face;
    const double len = mesh.face(face).diameter;
    const Point nK = mesh.outward_normal(cell, lf);
    const int voff = sz.cell_velocity + lf * 2 * nf;
    const int poff = np + lf * nf;
    for (int q = 0; q < line.size(); ++q) {
      const double t = line.points[q];
      const Eigen::VectorXd phi = triangle_shape(degree, face_to_cell_bary(mesh, cell, lf, t));
      const Eigen::VectorXd psi = segment_shape(degree, t);
      const double w = line.weights[q] * len;
      for (int c = 0; c < 2; ++c) {
        B.block(poff, c * nk, nf, nk).noalias() += (w * nK(c)) * psi * phi.transpose();
        B.block(poff, voff + c * nf, nf, nf).noalias() -= (w * nK(c)) * psi * psi.transpose();
      }
    }
  }
  return B;
}

Eigen::VectorXd local_load(const Mesh& mesh, int cell, int degree, const BodyForce& f) {
  const int nk = triangle_dim(degree);
  const CellGeometry g = cell_geometry(mesh, cell);
  Eigen::VectorXd F = Eigen::VectorXd::Zero(2 * nk);
  if (!f) return F;
  const TriangleRule& rule = triangle_rule(2 * degree + 2);
  for (int q = 0; q < rule.size(); ++q) {
    const Vec2 fx = f(g.map(rule.points[q]));
    if (!std::isfinite(fx.x()) || !std::isfinite(fx.y()))
      throw AssemblyError("body force is not finite in cell " + std::to_string(cell));
    const Eigen::VectorXd phi = triangle_shape(degree, rule.points[q]);
    const double w = 2.0 * g.area * rule.weights[q];
    F.head(nk) += (w * fx.x()) * phi;
    F.tail(nk) += (w * fx.y()) * phi;
  }
  return F;
}

Eigen::VectorXd local_pressure_mean(const Mesh& mesh, int cell, int degree) {
  const double area = mesh.cell_area(cell);
  const TriangleRule& rule = triangle_rule(degree);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(triangle_dim(degree - 1));
  for (int q = 0; q < rule.size(); ++q) m += (2.0 * area * rule.weights[q]) * triangle_shape(degree - 1, rule.points[q]);
  return m;
}

LocalBlocks local_blocks(const Mesh& mesh, int cell, const MethodConfig& cfg, const BodyForce& f) {
  LocalBlocks lb;
  lb.a = local_a(mesh, cell, cfg);
  lb.b = local_b(mesh, cell, cfg.degree);
  lb.load = local_load(mesh, cell, cfg.degree, f);
  lb.mean = local_pressure_mean(mesh, cell, cfg.degree);
  return lb;
}

CellDofMap cell_dof_map(const Mesh& mesh, const SpaceSet& s, int cell) {
  CellDofMap m;
  const auto u = s.cell_velocity.entity_dofs(cell);
  m.u.assign(u.begin(), u.end());
  const auto p = s.cell_pressure.entity_dofs(cell);
  m.p.assign(p.begin(), p.end());
  for (int lf = 0; lf < 3; ++lf) {
    const int face = mesh.cell_faces(cell)[lf].face;
    const auto ub = s.facet_velocity.entity_dofs(face);
    m.ubar.insert(m.ubar.end(), ub.begin(), ub.end());
    const auto pb = s.facet_pressure.entity_dofs(face);
    m.pbar.insert(m.pbar.end(), pb.begin(), pb.end());
  }
  return m;
}

namespace {

SystemIndex make_index(const SpaceSet& s, bool keep_cell_unknowns) {
  SystemIndex idx;
  idx.n_u = s.cell_velocity.num_dofs();
  idx.n_ubar = s.facet_velocity.num_dofs();
  idx.n_p = s.cell_pressure.num_dofs();
  idx.n_pbar = s.facet_pressure.num_dofs();
  idx.full_to_reduced.assign(idx.full_size(), -1);
  auto keep = [&](int full) {
    idx.full_to_reduced[full] = static_cast<int>(idx.reduced_to_full.size());
    idx.reduced_to_full.push_back(full);
  };
  if (keep_cell_unknowns)
    for (int i = 0; i < idx.n_u; ++i) keep(i);
  for (int i = 0; i < idx.n_ubar; ++i)
    if (!s.facet_velocity.is_constrained(i)) keep(idx.off_ubar() + i);
  if (keep_cell_unknowns)
    for (int i = 0; i < idx.n_p; ++i) keep(idx.off_p() + i);
  // Without cell pressures the mean-value row would couple every cell; the
  // condensed system pins the first facet pressure instead.
  for (int i = keep_cell_unknowns ? 0 : 1; i < idx.n_pbar; ++i) keep(idx.off_pbar() + i);
  if (keep_cell_unknowns) keep(idx.multiplier());
  return idx;
}

}  // namespace

SystemIndex full_system_index(const SpaceSet& spaces) { return make_index(spaces, true); }
SystemIndex condensed_system_index(const SpaceSet& spaces) { return make_index(spaces, false); }

void check_boundary_data(const Mesh& mesh, const SpaceSet& spaces, const Eigen::VectorXd& bc) {
  const DofLayout& fv = spaces.facet_velocity;
  if (bc.size() != fv.num_dofs())
    throw AssemblyError("boundary data has " + std::to_string(bc.size()) + " entries, expected " +
                        std::to_string(fv.num_dofs()));
  for (int i = 0; i < fv.num_dofs(); ++i) {
    if (fv.is_constrained(i) && !std::isfinite(bc(i)))
      throw AssemblyError("missing or non-finite boundary value at facet dof " + std::to_string(i));
  }
  const double flux = boundary_flux(mesh, fv, bc);
  if (std::abs(flux) > 1e-10)
    throw AssemblyError("boundary data has net flux " + std::to_string(flux) +
                        "; balance it before assembly");
}

SaddleSystem assemble(const Mesh& mesh, const SpaceSet& spaces, const BodyForce& f, const Eigen::VectorXd& bc) {
  check_boundary_data(mesh, spaces, bc);
  const MethodConfig& cfg = spaces.cfg;
  SaddleSystem sys;
  sys.cfg = cfg;
  sys.index = full_system_index(spaces);
  sys.dirichlet = bc;
  sys.domain_area = mesh.total_area();
  sys.pressure_mean = Eigen::VectorXd::Zero(sys.index.n_p);
  const SystemIndex& idx = sys.index;
  const int n = idx.reduced_size();
  sys.rhs = Eigen::VectorXd::Zero(n);
  sys.matrix.resize(n, n);

  const LocalSizes sz(cfg.degree);
  std::vector<LocalBlocks> blocks;
  std::vector<Eigen::Triplet<double>> triplets;
  for (int first = 0; first < mesh.num_cells(); first += kBatch) {
    const int last = std::min(mesh.num_cells(), first + kBatch);
    blocks.assign(last - first, {});
    parallel_for(first, last, [&](int c) { blocks[c - first] = local_blocks(mesh, c, cfg, f); });
    triplets.clear();
    for (int c = first; c < last; ++c) {
      const LocalBlocks& lb = blocks[c - first];
      const CellDofMap map = cell_dof_map(mesh, spaces, c);
      std::vector<int> vel(sz.velocity()), pres(sz.pressure());
      for (int i = 0; i < sz.cell_velocity; ++i) vel[i] = map.u[i];
      for (int i = 0; i < sz.facet_velocity; ++i) vel[sz.cell_velocity + i] = idx.off_ubar() + map.ubar[i];
      for (int i = 0; i < sz.cell_pressure; ++i) pres[i] = idx.off_p() + map.p[i];
      for (int i = 0; i < sz.facet_pressure; ++i) pres[sz.cell_pressure + i] = idx.off_pbar() + map.pbar[i];

      auto add = [&](int row_full, int col_full, double v) {
        const int r = idx.full_to_reduced[row_full];
        if (r < 0) return;
        const int cc = idx.full_to_reduced[col_full];
        if (cc < 0) {
          sys.rhs(r) -= v * bc(col_full - idx.off_ubar());
          return;
        }
        triplets.emplace_back(r, cc, v);
      };
      for (int i = 0; i < sz.velocity(); ++i)
        for (int j = 0; j < sz.velocity(); ++j) add(vel[i], vel[j], cfg.nu * lb.a(i, j));
      for (int r = 0; r < sz.pressure(); ++r) {
        for (int j = 0; j < sz.velocity(); ++j) {
          if (lb.b(r, j) == 0.0) continue;
          add(pres[r], vel[j], lb.b(r, j));
          add(vel[j], pres[r], lb.b(r, j));
        }
      }
      for (int r = 0; r < sz.cell_pressure; ++r) {
        add(pres[r], idx.multiplier(), lb.mean(r));
        add(idx.multiplier(), pres[r], lb.mean(r));
        sys.pressure_mean(map.p[r]) += lb.mean(r);
      }
      for (int i = 0; i < sz.cell_velocity; ++i) {
        const int r = idx.full_to_reduced[vel[i]];
        sys.rhs(r) += lb.load(i);
      }
    }
    Eigen::SparseMatrix<double> part(n, n);
    part.setFromTriplets(triplets.begin(), triplets.end());
    sys.matrix += part;
  }
  sys.matrix.makeCompressed();
  return sys;
}

void write_matrix_coordinates(std::ostream& os, const Eigen::SparseMatrix<double>& m) {
  const auto prec = os.precision(17);
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  os.precision(prec);
}

}  // namespace hdg
