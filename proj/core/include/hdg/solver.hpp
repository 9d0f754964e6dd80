#pragma once

#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hdg/assembly.hpp"
#include "hdg/mesh.hpp"
#include "hdg/spaces.hpp"

namespace hdg {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coefficients of (u_h, ubar_h, p_h, pbar_h) in the layouts of the SpaceSet
/// that produced them. ubar includes the Dirichlet values.
struct DiscreteStokesSolution {
  MethodConfig cfg;
  Eigen::VectorXd u;
  Eigen::VectorXd ubar;
  Eigen::VectorXd p;
  Eigen::VectorXd pbar;
  double multiplier = 0.0;
  int global_unknowns = 0;  ///< size of the factorized system
};

/// Solves A x = b with a sparse LDL^T factorization, falling back to LU when
/// the factorization breaks down; throws SolverError on a singular matrix or a
/// residual above 1e-10 (1 + |b|).
Eigen::VectorXd sparse_direct_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b);

DiscreteStokesSolution solve_full(const SaddleSystem& sys);

/// Eliminates cell velocity and cell pressure per cell, solves for facet
/// velocity and facet pressure, then reconstructs. Requires balanced boundary
/// data, for which the mean-value multiplier of the full system vanishes.
DiscreteStokesSolution solve_condensed(const Mesh& mesh, const SpaceSet& spaces, const BodyForce& f,
                                       const Eigen::VectorXd& bc);

/// Number of globally coupled unknowns of the condensed system.
int condensed_unknowns(const SpaceSet& spaces);

}  // namespace hdg
