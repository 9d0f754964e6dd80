#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "hdg/basis.hpp"
#include "hdg/exact_solution.hpp"
#include "hdg/mesh.hpp"

namespace hdg {

enum class Method { HDG, EDG_HDG, EDG };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view s);

struct MethodConfig {
  Method method = Method::EDG_HDG;
  int degree = 1;
  double alpha = 6.0;  ///< penalty
  double nu = 1.0;     ///< viscosity

  /// Penalty defaults to 6k^2.
  static MethodConfig make(Method method, int degree, std::optional<double> alpha = std::nullopt,
                           double nu = 1.0);
  static double default_alpha(int degree) { return 6.0 * degree * degree; }
  /// Throws std::invalid_argument on a bad degree, alpha or nu.
  void validate() const;

  [[nodiscard]] bool continuous_facet_velocity() const { return method != Method::HDG; }
  [[nodiscard]] bool continuous_facet_pressure() const { return method == Method::EDG; }
};

enum class SpaceKind {
  CellVelocity,
  FacetVelocityDiscontinuous,
  FacetVelocityContinuous,
  CellPressure,
  FacetPressureDiscontinuous,
  FacetPressureContinuous,
};

/// Entity-to-global numbering of one discrete space. Entities are cells for
/// cell spaces and face records for facet spaces. Per entity, dofs are
/// ordered component-major: index = component * nodes + node.
class DofLayout {
 public:
  DofLayout() = default;
  DofLayout(SpaceKind kind, int degree, int components, int nodes, std::vector<int> dofs, int num_dofs,
            std::vector<char> constrained);

  [[nodiscard]] SpaceKind kind() const { return kind_; }
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] int components() const { return components_; }
  [[nodiscard]] int nodes_per_entity() const { return nodes_; }
  [[nodiscard]] int dofs_per_entity() const { return components_ * nodes_; }
  [[nodiscard]] int num_entities() const;
  [[nodiscard]] int num_dofs() const { return num_dofs_; }
  [[nodiscard]] std::span<const int> entity_dofs(int entity) const;
  [[nodiscard]] bool is_constrained(int dof) const { return constrained_[dof] != 0; }
  [[nodiscard]] const std::vector<char>& constrained() const { return constrained_; }
  [[nodiscard]] int num_constrained() const;
  [[nodiscard]] int num_free() const { return num_dofs_ - num_constrained(); }
  [[nodiscard]] bool on_facets() const;

 private:
  SpaceKind kind_ = SpaceKind::CellVelocity;
  int degree_ = 1;
  int components_ = 1;
  int nodes_ = 1;
  std::vector<int> dofs_;
  int num_dofs_ = 0;
  std::vector<char> constrained_;
};

struct SpaceSet {
  MethodConfig cfg;
  DofLayout cell_velocity;
  DofLayout facet_velocity;
  DofLayout cell_pressure;
  DofLayout facet_pressure;
};

SpaceSet build_spaces(const Mesh& mesh, const MethodConfig& cfg);

/// Shape values (and physical gradients for cell spaces) of one entity.
struct BasisValues {
  Eigen::VectorXd values;
  Eigen::Matrix<double, Eigen::Dynamic, 2> gradients;  ///< empty for facet spaces
};

/// `ref` holds (xi, eta) on the reference triangle for cell layouts and t in
/// [0,1] for facet layouts.
BasisValues eval_basis(const Mesh& mesh, const DofLayout& layout, int entity, std::span<const double> ref);

/// Nodal values of the exact velocity at every facet velocity dof. Entries of
/// unconstrained dofs are filled as well; the solver only reads constrained ones.
Eigen::VectorXd interpolate_facet_dirichlet(const ExactSolution& exact, const Mesh& mesh,
                                            const DofLayout& facet_velocity);

/// Nodal facet interpolation of an arbitrary vector field (side = centroid of
/// the first parent of the face carrying the dof).
template <class Field>
Eigen::VectorXd interpolate_facet_field(const Field& field, const Mesh& mesh, const DofLayout& facet_velocity);

/// Net discrete outflow sum_F int_F g . n over boundary faces.
double boundary_flux(const Mesh& mesh, const DofLayout& facet_velocity, const Eigen::VectorXd& values);

/// Removes the net outflow of interpolated boundary data by subtracting a
/// multiple of the interpolant of the linear field (x - x_c)/(2|Omega|),
/// whose boundary flux is one. Returns the removed flux.
double balance_boundary_flux(const Mesh& mesh, const DofLayout& facet_velocity, Eigen::VectorXd& values);

// ---------------------------------------------------------------------------

namespace detail {
Point facet_node_point(const Mesh& mesh, int face, int degree, int node);
}

template <class Field>
Eigen::VectorXd interpolate_facet_field(const Field& field, const Mesh& mesh, const DofLayout& layout) {
  Eigen::VectorXd values = Eigen::VectorXd::Zero(layout.num_dofs());
  const int nodes = layout.nodes_per_entity();
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto dofs = layout.entity_dofs(f);
    const Point side = mesh.cell_centroid(mesh.face(f).parents[0].cell);
    for (int j = 0; j < nodes; ++j) {
      const Point x = detail::facet_node_point(mesh, f, layout.degree(), j);
      const Vec2 u = field(x, side);
      values(dofs[j]) = u.x();
      values(dofs[nodes + j]) = u.y();
    }
  }
  return values;
}

}  // namespace hdg
