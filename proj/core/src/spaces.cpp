#include "hdg/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hdg/geometry.hpp"
#include "hdg/quadrature.hpp"

namespace hdg {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::HDG: return "hdg";
    case Method::EDG_HDG: return "edg-hdg";
    case Method::EDG: return "edg";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view s) {
  if (s == "hdg") return Method::HDG;
  if (s == "edg-hdg") return Method::EDG_HDG;
  if (s == "edg") return Method::EDG;
  return std::nullopt;
}

MethodConfig MethodConfig::make(Method method, int degree, std::optional<double> alpha, double nu) {
  MethodConfig cfg;
  cfg.method = method;
  cfg.degree = degree;
  cfg.alpha = alpha.value_or(default_alpha(degree));
  cfg.nu = nu;
  cfg.validate();
  return cfg;
}

void MethodConfig::validate() const {
  if (degree != 1 && degree != 2) throw std::invalid_argument("unsupported degree " + std::to_string(degree));
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("penalty alpha must be positive");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("viscosity nu must be positive");
}

DofLayout::DofLayout(SpaceKind kind, int degree, int components, int nodes, std::vector<int> dofs, int num_dofs,
                     std::vector<char> constrained)
    : kind_(kind),
      degree_(degree),
      components_(components),
      nodes_(nodes),
      dofs_(std::move(dofs)),
      num_dofs_(num_dofs),
      constrained_(std::move(constrained)) {}

int DofLayout::num_entities() const {
  return dofs_per_entity() == 0 ? 0 : static_cast<int>(dofs_.size()) / dofs_per_entity();
}

std::span<const int> DofLayout::entity_dofs(int entity) const {
  if (entity < 0 || entity >= num_entities()) throw std::out_of_range("entity index out of range");
  const auto n = static_cast<std::size_t>(dofs_per_entity());
  return std::span<const int>(dofs_).subspan(static_cast<std::size_t>(entity) * n, n);
}

int DofLayout::num_constrained() const {
  return static_cast<int>(std::count(constrained_.begin(), constrained_.end(), char{1}));
}

bool DofLayout::on_facets() const {
  return kind_ != SpaceKind::CellVelocity && kind_ != SpaceKind::CellPressure;
}

namespace {

DofLayout cell_layout(const Mesh& mesh, SpaceKind kind, int degree, int components) {
  const int nodes = triangle_dim(degree);
  const int per = nodes * components;
  const int n = per * mesh.num_cells();
  std::vector<int> dofs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) dofs[i] = i;
  return DofLayout(kind, degree, components, nodes, std::move(dofs), n, std::vector<char>(n, 0));
}

DofLayout facet_layout_discontinuous(const Mesh& mesh, SpaceKind kind, int degree, int components,
                                     bool constrain_boundary) {
  const int nodes = segment_dim(degree);
  const int per = nodes * components;
  const int n = per * mesh.num_faces();
  std::vector<int> dofs(static_cast<std::size_t>(n));
  std::vector<char> constrained(n, 0);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const bool bnd = constrain_boundary && mesh.face(f).is_boundary();
    for (int i = 0; i < per; ++i) {
      dofs[f * per + i] = f * per + i;
      constrained[f * per + i] = bnd ? 1 : 0;
    }
  }
  return DofLayout(kind, degree, components, nodes, std::move(dofs), n, std::move(constrained));
}

// Vertex dofs first (vertex-major, component-minor), then one midpoint per face for k = 2.
DofLayout facet_layout_continuous(const Mesh& mesh, SpaceKind kind, int degree, int components,
                                  bool constrain_boundary) {
  const int nodes = segment_dim(degree);
  const int per = nodes * components;
  const int nv = mesh.num_vertices();
  const int n_vertex = components * nv;
  const int n = n_vertex + (degree == 2 ? components * mesh.num_faces() : 0);
  std::vector<int> dofs(static_cast<std::size_t>(per) * mesh.num_faces());
  std::vector<char> constrained(n, 0);
  const auto& bmask = mesh.boundary_vertex_mask();
  if (constrain_boundary) {
    for (int v = 0; v < nv; ++v)
      for (int c = 0; c < components; ++c) constrained[v * components + c] = bmask[v];
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& face = mesh.face(f);
    for (int c = 0; c < components; ++c) {
      int* slot = &dofs[static_cast<std::size_t>(f) * per + c * nodes];
      slot[0] = face.vertices[0] * components + c;
      slot[1] = face.vertices[1] * components + c;
      if (degree == 2) {
        slot[2] = n_vertex + f * components + c;
        if (constrain_boundary && face.is_boundary()) constrained[slot[2]] = 1;
      }
    }
  }
  return DofLayout(kind, degree, components, nodes, std::move(dofs), n, std::move(constrained));
}

}  // namespace

SpaceSet build_spaces(const Mesh& mesh, const MethodConfig& cfg) {
  cfg.validate();
  const int k = cfg.degree;
  SpaceSet s;
  s.cfg = cfg;
  s.cell_velocity = cell_layout(mesh, SpaceKind::CellVelocity, k, 2);
  s.cell_pressure = cell_layout(mesh, SpaceKind::CellPressure, k - 1, 1);
  s.facet_velocity = cfg.continuous_facet_velocity()
                         ? facet_layout_continuous(mesh, SpaceKind::FacetVelocityContinuous, k, 2, true)
                         : facet_layout_discontinuous(mesh, SpaceKind::FacetVelocityDiscontinuous, k, 2, true);
  s.facet_pressure = cfg.continuous_facet_pressure()
                         ? facet_layout_continuous(mesh, SpaceKind::FacetPressureContinuous, k, 1, false)
                         : facet_layout_discontinuous(mesh, SpaceKind::FacetPressureDiscontinuous, k, 1, false);
  return s;
}

BasisValues eval_basis(const Mesh& mesh, const DofLayout& layout, int entity, std::span<const double> ref) {
  BasisValues out;
  if (layout.on_facets()) {
    if (entity < 0 || entity >= mesh.num_faces()) throw std::out_of_range("face index out of range");
    if (ref.size() != 1) throw std::invalid_argument("facet basis expects one reference coordinate");
    out.values = segment_shape(layout.degree(), ref[0]);
    return out;
  }
  if (entity < 0 || entity >= mesh.num_cells()) throw std::out_of_range("cell index out of range");
  if (ref.size() != 2) throw std::invalid_argument("cell basis expects two reference coordinates");
  const Bary l{1.0 - ref[0] - ref[1], ref[0], ref[1]};
  const CellGeometry g = cell_geometry(mesh, entity);
  out.values = triangle_shape(layout.degree(), l);
  out.gradients = triangle_shape_grad(layout.degree(), l, g.grad_bary);
  return out;
}

namespace detail {
Point facet_node_point(const Mesh& mesh, int face, int degree, int node) {
  const auto [a, b] = mesh.face_points(face);
  const double t = segment_node(degree, node);
  return (1.0 - t) * a + t * b;
}
}  // namespace detail

Eigen::VectorXd interpolate_facet_dirichlet(const ExactSolution& exact, const Mesh& mesh,
                                            const DofLayout& facet_velocity) {
  return interpolate_facet_field(
      [&exact](const Point& x, const Point& side) { return exact.velocity(x, side); }, mesh, facet_velocity);
}

double boundary_flux(const Mesh& mesh, const DofLayout& layout, const Eigen::VectorXd& values) {
  const int k = layout.degree();
  const int nodes = layout.nodes_per_entity();
  const LineRule& rule = gauss_line(k + 1);
  double flux = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (!face.is_boundary()) continue;
    const auto dofs = layout.entity_dofs(f);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::VectorXd phi = segment_shape(k, rule.points[q]);
      Vec2 g = Vec2::Zero();
      for (int j = 0; j < nodes; ++j) {
        g.x() += phi(j) * values(dofs[j]);
        g.y() += phi(j) * values(dofs[nodes + j]);
      }
      flux += rule.weights[q] * face.diameter * g.dot(face.normal);
    }
  }
  return flux;
}

double balance_boundary_flux(const Mesh& mesh, const DofLayout& layout, Eigen::VectorXd& values) {
  const double area = mesh.total_area();
  Point xc = Point::Zero();
  for (int c = 0; c < mesh.num_cells(); ++c) xc += mesh.cell_area(c) * mesh.cell_centroid(c);
  xc /= area;
  const Eigen::VectorXd w = interpolate_facet_field(
      [&](const Point& x, const Point&) -> Vec2 { return (x - xc) / (2.0 * area); }, mesh, layout);
  const double flux_w = boundary_flux(mesh, layout, w);
  const double defect = boundary_flux(mesh, layout, values);
  const double scale = defect / flux_w;
  for (int i = 0; i < layout.num_dofs(); ++i) {
    if (layout.is_constrained(i)) values(i) -= scale * w(i);
  }
  return defect;
}

}  // namespace hdg
