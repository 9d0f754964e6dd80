#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hdg/basis.hpp"
#include "hdg/exact_solution.hpp"
#include "hdg/mesh.hpp"
#include "hdg/solver.hpp"
#include "hdg/spaces.hpp"

namespace hdg {

struct ErrorReport {
  double u_l2 = 0.0;             ///< |u - u_h|
  double u_energy = 0.0;         ///< |||(u,u) - (u_h,ubar_h)|||_v
  double p_l2 = 0.0;             ///< |p - p_h|, both mean-free
  double div_sup = 0.0;          ///< max_K |div u_h|_inf
  double normal_jump_sup = 0.0;  ///< max over interior faces of |[u_h].n_F|
  double u_jump = 0.0;           ///< |u_h|_j
  double u_grad_jump = 0.0;      ///< |u_h|_g
  double osc_f = 0.0;            ///< osc(f)
  double u_max = 0.0;            ///< max nodal |u_h|
};

/// Composite rule for error integrals: cells with a vertex at a singular point
/// are subdivided `singular_depth` times toward that vertex.
struct ErrorQuadrature {
  int base_degree = 10;
  int singular_depth = 8;
};

/// Calls fn(bary, x, weight) at every point of the composite rule on a cell.
void for_each_cell_point(const Mesh& mesh, int cell, const std::vector<Point>& singular_points,
                         const ErrorQuadrature& q, const std::function<void(const Bary&, const Point&, double)>& fn);

/// Cell velocity value and gradient at a barycentric point.
Vec2 cell_velocity_value(const DofLayout& layout, const Eigen::VectorXd& u, int cell, const Bary& l);
Mat2 cell_velocity_gradient(const Mesh& mesh, const DofLayout& layout, const Eigen::VectorXd& u, int cell,
                            const Bary& l);

double energy_error(const ExactSolution& exact, const Mesh& mesh, const SpaceSet& spaces,
                    const DiscreteStokesSolution& sol, const ErrorQuadrature& q = {});

/// (velocity L2 error, pressure L2 error after removing both means)
std::pair<double, double> l2_errors(const ExactSolution& exact, const Mesh& mesh, const SpaceSet& spaces,
                                    const DiscreteStokesSolution& sol, const ErrorQuadrature& q = {});

/// (div_sup, normal_jump_sup)
std::pair<double, double> structure_checks(const Mesh& mesh, const SpaceSet& spaces, const Eigen::VectorXd& u);

/// |v|_j^2 = sum_F h_F^-1 |[v]|_F^2 over all faces (boundary jump = trace).
double jump_seminorm(const Mesh& mesh, const DofLayout& layout, const Eigen::VectorXd& v);
/// |t|_g^2 = sum over interior F of h_F |[grad t] n_F|_F^2.
double gradient_jump_seminorm(const Mesh& mesh, const DofLayout& layout, const Eigen::VectorXd& t);
/// |(v,vbar)|_f^2 = sum_K h_K^-1 |v - vbar|_dK^2.
double facet_seminorm(const Mesh& mesh, const SpaceSet& spaces, const Eigen::VectorXd& u, const Eigen::VectorXd& ubar);
/// osc(g)^2 = sum_K h_K^2 |g|_K^2.
double oscillation(const Mesh& mesh, const std::function<Vec2(const Point&)>& g, const ErrorQuadrature& q = {},
                   const std::vector<Point>& singular_points = {});

ErrorReport compute_error_report(const ExactSolution& exact, const Mesh& mesh, const SpaceSet& spaces,
                                 const DiscreteStokesSolution& sol, const ErrorQuadrature& q = {});

/// rate_i = log2(e_{i-1} / e_i); the first entry and entries next to a
/// non-positive error are absent.
std::vector<std::optional<double>> eoc(const std::vector<double>& errors);

/// Global operators on the homogeneous discrete velocity space (cell velocity
/// followed by free facet velocity) and the pressure space.
struct DiscreteOperators {
  Eigen::SparseMatrix<double> a;        ///< a_h with the configured alpha, nu = 1
  Eigen::SparseMatrix<double> energy;   ///< Gram matrix of |||.|||_v
  Eigen::SparseMatrix<double> b;        ///< rows [p | pbar], cols velocity
  Eigen::SparseMatrix<double> pressure_norm;  ///< Gram matrix of |||.|||_p
  Eigen::VectorXd pressure_mean;        ///< int q over [p | pbar] (zero on pbar)
};

DiscreteOperators build_discrete_operators(const Mesh& mesh, const SpaceSet& spaces);

class DenseGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Smallest inf-sup constant of b_h between |||.|||_v and |||.|||_p on the
/// mean-free pressure space. Dense; total dofs must not exceed 2000.
double inf_sup_probe(const Mesh& mesh, const SpaceSet& spaces);

struct CoercivitySample {
  double min_quotient = 0.0;
  double max_quotient = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
};

/// Rayleigh quotients a_h(v,v) / |||v|||_v^2 over seeded Gaussian random
/// discrete fields.
CoercivitySample sample_coercivity(const Mesh& mesh, const SpaceSet& spaces, int samples, std::uint64_t seed);

/// Smallest generalized eigenvalue of (a_h, |||.|||_v Gram); dense, guarded
/// like inf_sup_probe.
double coercivity_constant(const Mesh& mesh, const SpaceSet& spaces);

}  // namespace hdg
