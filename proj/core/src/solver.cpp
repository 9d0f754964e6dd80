#include "hdg/solver.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/LU>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#include <Eigen/SparseCholesky>

#include "hdg/parallel.hpp"

namespace hdg {

namespace {

// Solution with up to two steps of iterative refinement.
template <class Factor>
Eigen::VectorXd refined_solve(const Factor& f, const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                              double& residual) {
  Eigen::VectorXd x = f.solve(b);
  residual = (A * x - b).norm();
  for (int it = 0; it < 2 && std::isfinite(residual); ++it) {
    const Eigen::VectorXd r = b - A * x;
    const Eigen::VectorXd y = x + f.solve(r);
    const double res = (A * y - b).norm();
    if (!(res < residual)) break;
    x = y;
    residual = res;
  }
  return x;
}

}  // namespace

Eigen::VectorXd sparse_direct_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b) {
  const double tol = 1e-10 * (1.0 + b.norm());
  double residual = 0.0;
  {
    // Quasi-definite systems factor without pivoting.
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() == Eigen::Success) {
      const Eigen::VectorXd x = refined_solve(ldlt, A, b, residual);
      if (x.allFinite() && residual <= 1e-3 * tol) return x;
    }
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw SolverError("sparse factorization failed (singular system of size " + std::to_string(A.rows()) +
                      "; check the penalty parameter and the mesh)");
  const Eigen::VectorXd x = refined_solve(lu, A, b, residual);
  if (!x.allFinite() || !(residual <= tol))
    throw SolverError("residual " + std::to_string(residual) + " exceeds tolerance; system is near-singular");
  return x;
}

namespace {

void recenter_pressure(DiscreteStokesSolution& sol, const Eigen::VectorXd& mean_weights, double area) {
  const double mean = mean_weights.dot(sol.p) / area;
  sol.p.array() -= mean;
  sol.pbar.array() -= mean;
}

struct CondensedCell {
  Eigen::MatrixXd S;       ///< external Schur complement
  Eigen::VectorXd g;       ///< external right-hand side
  Eigen::MatrixXd Z;       ///< L_II^{-1} [L_IE | b_I]
  Eigen::VectorXd mean;    ///< cell pressure mean weights
  std::vector<int> ext;    ///< full index of each external local dof
};

CondensedCell condense_cell(const Mesh& mesh, const SpaceSet& spaces, const SystemIndex& idx, int cell,
                            const BodyForce& f) {
  const MethodConfig& cfg = spaces.cfg;
  const LocalSizes sz(cfg.degree);
  const LocalBlocks lb = local_blocks(mesh, cell, cfg, f);
  const int cv = sz.cell_velocity, cp = sz.cell_pressure, fv = sz.facet_velocity, fp = sz.facet_pressure;
  const int nI = cv + cp;
  const int nE = fv + fp;

  Eigen::MatrixXd LII = Eigen::MatrixXd::Zero(nI, nI);
  LII.topLeftCorner(cv, cv) = cfg.nu * lb.a.topLeftCorner(cv, cv);
  LII.block(cv, 0, cp, cv) = lb.b.topLeftCorner(cp, cv);
  LII.block(0, cv, cv, cp) = lb.b.topLeftCorner(cp, cv).transpose();

  Eigen::MatrixXd LIE = Eigen::MatrixXd::Zero(nI, nE + 1);
  LIE.block(0, 0, cv, fv) = cfg.nu * lb.a.block(0, cv, cv, fv);
  LIE.block(0, fv, cv, fp) = lb.b.block(cp, 0, fp, cv).transpose();
  LIE.block(0, nE, cv, 1) = lb.load;  // b_I appended as last column

  Eigen::MatrixXd LEE = Eigen::MatrixXd::Zero(nE, nE);
  LEE.topLeftCorner(fv, fv) = cfg.nu * lb.a.block(cv, cv, fv, fv);
  LEE.block(fv, 0, fp, fv) = lb.b.block(cp, cv, fp, fv);
  LEE.block(0, fv, fv, fp) = lb.b.block(cp, cv, fp, fv).transpose();

  Eigen::FullPivLU<Eigen::MatrixXd> lu(LII);
  if (!lu.isInvertible())
    throw SolverError("local cell block is singular in cell " + std::to_string(cell) +
                      " (penalty too small or degenerate cell)");

  CondensedCell out;
  out.Z = lu.solve(LIE);
  const Eigen::MatrixXd LEI = LIE.leftCols(nE).transpose();
  out.S = LEE - LEI * out.Z.leftCols(nE);
  out.g = -LEI * out.Z.col(nE);
  out.mean = lb.mean;

  const CellDofMap map = cell_dof_map(mesh, spaces, cell);
  out.ext.resize(nE);
  for (int i = 0; i < fv; ++i) out.ext[i] = idx.off_ubar() + map.ubar[i];
  for (int i = 0; i < fp; ++i) out.ext[fv + i] = idx.off_pbar() + map.pbar[i];
  return out;
}

constexpr int kBatch = 4096;

}  // namespace

DiscreteStokesSolution solve_full(const SaddleSystem& sys) {
  const Eigen::VectorXd x = sparse_direct_solve(sys.matrix, sys.rhs);
  const SystemIndex& idx = sys.index;
  DiscreteStokesSolution sol;
  sol.cfg = sys.cfg;
  sol.global_unknowns = idx.reduced_size();
  sol.u.resize(idx.n_u);
  sol.ubar = sys.dirichlet;
  sol.p.resize(idx.n_p);
  sol.pbar.resize(idx.n_pbar);
  for (int r = 0; r < idx.reduced_size(); ++r) {
    const int full = idx.reduced_to_full[r];
    if (full < idx.off_ubar()) sol.u(full) = x(r);
    else if (full < idx.off_p()) sol.ubar(full - idx.off_ubar()) = x(r);
    else if (full < idx.off_pbar()) sol.p(full - idx.off_p()) = x(r);
    else if (full < idx.multiplier()) sol.pbar(full - idx.off_pbar()) = x(r);
    else sol.multiplier = x(r);
  }
  recenter_pressure(sol, sys.pressure_mean, sys.domain_area);
  return sol;
}

int condensed_unknowns(const SpaceSet& spaces) { return condensed_system_index(spaces).reduced_size(); }

DiscreteStokesSolution solve_condensed(const Mesh& mesh, const SpaceSet& spaces, const BodyForce& f,
                                       const Eigen::VectorXd& bc) {
  check_boundary_data(mesh, spaces, bc);
  const SystemIndex idx = condensed_system_index(spaces);
  const int n = idx.reduced_size();
  const int off_ubar = idx.off_ubar();
  Eigen::SparseMatrix<double> A(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd mean_weights = Eigen::VectorXd::Zero(idx.n_p);

  std::vector<CondensedCell> cells;
  std::vector<Eigen::Triplet<double>> triplets;
  for (int first = 0; first < mesh.num_cells(); first += kBatch) {
    const int last = std::min(mesh.num_cells(), first + kBatch);
    cells.assign(last - first, {});
    parallel_for(first, last, [&](int c) { cells[c - first] = condense_cell(mesh, spaces, idx, c, f); });
    triplets.clear();
    for (int c = first; c < last; ++c) {
      const CondensedCell& cc = cells[c - first];
      const int nE = static_cast<int>(cc.ext.size());
      for (int i = 0; i < nE; ++i) {
        const int r = idx.full_to_reduced[cc.ext[i]];
        if (r < 0) continue;
        rhs(r) += cc.g(i);
        for (int j = 0; j < nE; ++j) {
          const double v = cc.S(i, j);
          if (v == 0.0) continue;
          const int col = idx.full_to_reduced[cc.ext[j]];
          if (col >= 0) triplets.emplace_back(r, col, v);
          else if (cc.ext[j] < idx.off_p()) rhs(r) -= v * bc(cc.ext[j] - off_ubar);
        }
      }
      const auto pd = spaces.cell_pressure.entity_dofs(c);
      for (int i = 0; i < static_cast<int>(pd.size()); ++i) mean_weights(pd[i]) += cc.mean(i);
    }
    Eigen::SparseMatrix<double> part(n, n);
    part.setFromTriplets(triplets.begin(), triplets.end());
    A += part;
  }
  A.makeCompressed();
  const Eigen::VectorXd x = sparse_direct_solve(A, rhs);

  DiscreteStokesSolution sol;
  sol.cfg = spaces.cfg;
  sol.global_unknowns = n;
  sol.ubar = bc;
  sol.pbar = Eigen::VectorXd::Zero(idx.n_pbar);
  sol.u.resize(idx.n_u);
  sol.p.resize(idx.n_p);
  for (int r = 0; r < n; ++r) {
    const int full = idx.reduced_to_full[r];
    if (full < idx.off_p()) sol.ubar(full - off_ubar) = x(r);
    else sol.pbar(full - idx.off_pbar()) = x(r);
  }

  // Local reconstruction of the eliminated unknowns.
  const LocalSizes sz(spaces.cfg.degree);
  parallel_for(0, mesh.num_cells(), [&](int c) {
    const CondensedCell cc = condense_cell(mesh, spaces, idx, c, f);
    const int nE = static_cast<int>(cc.ext.size());
    Eigen::VectorXd xe(nE);
    for (int i = 0; i < nE; ++i) {
      const int full = cc.ext[i];
      xe(i) = full < idx.off_p() ? sol.ubar(full - off_ubar) : sol.pbar(full - idx.off_pbar());
    }
    const Eigen::VectorXd xi = cc.Z.col(nE) - cc.Z.leftCols(nE) * xe;
    const auto ud = spaces.cell_velocity.entity_dofs(c);
    for (int i = 0; i < sz.cell_velocity; ++i) sol.u(ud[i]) = xi(i);
    const auto pd = spaces.cell_pressure.entity_dofs(c);
    for (int i = 0; i < sz.cell_pressure; ++i) sol.p(pd[i]) = xi(sz.cell_velocity + i);
  });
  recenter_pressure(sol, mean_weights, mesh.total_area());
  return sol;
}

}  // namespace hdg
