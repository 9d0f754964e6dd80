#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hdg/mesh.hpp"
#include "hdg/spaces.hpp"

namespace hdg {

class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using BodyForce = std::function<Vec2(const Point&)>;

/// Sizes of the per-cell local spaces.
struct LocalSizes {
  int cell_velocity;   ///< 2 dim P_k
  int facet_velocity;  ///< 3 faces x 2 (k+1)
  int cell_pressure;   ///< dim P_{k-1}
  int facet_pressure;  ///< 3 faces x (k+1)

  explicit LocalSizes(int degree);
  [[nodiscard]] int velocity() const { return cell_velocity + facet_velocity; }
  [[nodiscard]] int pressure() const { return cell_pressure + facet_pressure; }
};

/// The three pieces of the cell contribution to a_h over [cell velocity |
/// facet velocity on local faces 0,1,2]:
///   volume      = int_K grad v : grad w
///   penalty     = h_K^-1 int_dK (v - vbar).(w - wbar)      (unscaled by alpha)
///   consistency = -int_dK (v - vbar).dw/dn + (w - wbar).dv/dn
struct LocalA {
  Eigen::MatrixXd volume;
  Eigen::MatrixXd penalty;
  Eigen::MatrixXd consistency;

  [[nodiscard]] Eigen::MatrixXd total(double alpha) const { return volume + alpha * penalty + consistency; }
};

/// Cell blocks; velocity ordering [u_K | ubar on faces 0..2], pressure
/// ordering [p_K | pbar on faces 0..2].
struct LocalBlocks {
  Eigen::MatrixXd a;     ///< a_h, unscaled by nu
  Eigen::MatrixXd b;     ///< rows pressure, cols velocity
  Eigen::VectorXd load;  ///< int_K f.v over cell velocity shapes
  Eigen::VectorXd mean;  ///< int_K q over cell pressure shapes
};

LocalA local_a_parts(const Mesh& mesh, int cell, int degree);
Eigen::MatrixXd local_a(const Mesh& mesh, int cell, const MethodConfig& cfg);
/// -int_K div(v) q + int_dK (v - vbar).n_K qbar
Eigen::MatrixXd local_b(const Mesh& mesh, int cell, int degree);
Eigen::VectorXd local_load(const Mesh& mesh, int cell, int degree, const BodyForce& f);
Eigen::VectorXd local_pressure_mean(const Mesh& mesh, int cell, int degree);
LocalBlocks local_blocks(const Mesh& mesh, int cell, const MethodConfig& cfg, const BodyForce& f);

/// Global indices of a cell's local dofs in each layout (facet parts in
/// local-face order; entries may repeat for continuous facet spaces).
struct CellDofMap {
  std::vector<int> u, ubar, p, pbar;
};
CellDofMap cell_dof_map(const Mesh& mesh, const SpaceSet& spaces, int cell);

/// Full numbering [u | ubar | p | pbar | multiplier] and its reduction to the
/// unknowns that remain after Dirichlet elimination.
struct SystemIndex {
  int n_u = 0, n_ubar = 0, n_p = 0, n_pbar = 0;
  std::vector<int> full_to_reduced;  ///< -1 for eliminated entries
  std::vector<int> reduced_to_full;

  [[nodiscard]] int off_ubar() const { return n_u; }
  [[nodiscard]] int off_p() const { return n_u + n_ubar; }
  [[nodiscard]] int off_pbar() const { return n_u + n_ubar + n_p; }
  [[nodiscard]] int multiplier() const { return n_u + n_ubar + n_p + n_pbar; }
  [[nodiscard]] int full_size() const { return multiplier() + 1; }
  [[nodiscard]] int reduced_size() const { return static_cast<int>(reduced_to_full.size()); }
};

/// Keeps every unknown except constrained facet velocity dofs.
SystemIndex full_system_index(const SpaceSet& spaces);
/// Keeps free facet velocity and every facet pressure but the first, which is
/// pinned to zero (the pressure is recentered after the solve).
SystemIndex condensed_system_index(const SpaceSet& spaces);

/// Symmetric indefinite system over the reduced unknowns of full_system_index.
struct SaddleSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  SystemIndex index;
  Eigen::VectorXd dirichlet;      ///< facet velocity values, read at constrained dofs
  Eigen::VectorXd pressure_mean;  ///< int_K q over cell pressure dofs
  double domain_area = 0.0;
  MethodConfig cfg;
};

/// Validates boundary data: right size, finite on constrained dofs, and zero
/// net flux to 1e-10. Throws AssemblyError otherwise.
void check_boundary_data(const Mesh& mesh, const SpaceSet& spaces, const Eigen::VectorXd& bc);

SaddleSystem assemble(const Mesh& mesh, const SpaceSet& spaces, const BodyForce& f, const Eigen::VectorXd& bc);

/// Writes `row col value` lines (0-based) of the matrix.
void write_matrix_coordinates(std::ostream& os, const Eigen::SparseMatrix<double>& m);

}  // namespace hdg
