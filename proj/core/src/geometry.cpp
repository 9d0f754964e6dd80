#include "hdg/geometry.hpp"

namespace hdg {

CellGeometry cell_geometry(const Mesh& mesh, int cell) {
  CellGeometry g;
  g.x = mesh.cell_points(cell);
  g.area = mesh.cell_area(cell);
  g.diameter = mesh.cell_diameter(cell);
  const double inv = 1.0 / (2.0 * g.area);
  for (int i = 0; i < 3; ++i) {
    const Point& a = g.x[(i + 1) % 3];
    const Point& b = g.x[(i + 2) % 3];
    g.grad_bary(i, 0) = (a.y() - b.y()) * inv;
    g.grad_bary(i, 1) = (b.x() - a.x()) * inv;
  }
  return g;
}

Bary face_to_cell_bary(const Mesh& mesh, int cell, int local_face, double t) {
  const auto& verts = mesh.cell(cell);
  const int face = mesh.cell_faces(cell)[local_face].face;
  const int i1 = (local_face + 1) % 3;
  const int i2 = (local_face + 2) % 3;
  Bary l{0.0, 0.0, 0.0};
  if (verts[i1] == mesh.face(face).vertices[0]) {
    l[i1] = 1.0 - t;
    l[i2] = t;
  } else {
    l[i1] = t;
    l[i2] = 1.0 - t;
  }
  return l;
}

Bary physical_to_bary(const CellGeometry& g, const Point& p) {
  Bary l{};
  for (int i = 0; i < 3; ++i) {
    l[i] = g.grad_bary.row(i).dot(p - g.x[(i + 1) % 3]);
  }
  return l;
}

}  // namespace hdg
