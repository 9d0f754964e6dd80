#pragma once

#include <array>

#include <Eigen/Core>

#include "hdg/basis.hpp"
#include "hdg/mesh.hpp"

namespace hdg {

/// Affine data of one cell.
struct CellGeometry {
  std::array<Point, 3> x;
  double area = 0.0;
  double diameter = 0.0;
  Eigen::Matrix<double, 3, 2> grad_bary;  ///< row i = grad lambda_i

  [[nodiscard]] Point map(const Bary& l) const { return l[0] * x[0] + l[1] * x[1] + l[2] * x[2]; }
};

CellGeometry cell_geometry(const Mesh& mesh, int cell);

/// Barycentric coordinates in `cell` of the point at parameter t along face
/// `local_face`, where t runs from face.vertices[0] to face.vertices[1].
Bary face_to_cell_bary(const Mesh& mesh, int cell, int local_face, double t);

/// Barycentric coordinates of a physical point with respect to a cell.
Bary physical_to_bary(const CellGeometry& g, const Point& p);

}  // namespace hdg
