#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace hdg {

using Point = Eigen::Vector2d;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FaceKind { Interior, Boundary };

struct FaceParent {
  int cell = -1;
  int local = -1;  ///< local face index in the parent (opposite vertex)
};

/// One element of the quotient set of (facet, cell) pairs. A geometric facet
/// on a crack appears as two boundary faces, one per parent cell.
struct Face {
  std::array<int, 2> vertices{};  ///< ascending vertex ids; parametrizes the facet
  std::array<FaceParent, 2> parents{};
  int num_parents = 0;
  FaceKind kind = FaceKind::Boundary;
  bool on_crack = false;
  double diameter = 0.0;
  Point normal = Point::Zero();  ///< unit, outward from parents[0]

  [[nodiscard]] bool is_interior() const { return kind == FaceKind::Interior; }
  [[nodiscard]] bool is_boundary() const { return kind == FaceKind::Boundary; }
};

struct CellFace {
  int face = -1;
  int sign = 1;  ///< n_K = sign * n_F on this face
};

struct CrackSegment {
  Point a;
  Point b;
};

/// Conforming triangulation with counter-clockwise cells. Local face i of a
/// cell is the edge opposite its vertex i. Immutable after construction.
class Mesh {
 public:
  Mesh() = default;

  /// Builds faces and connectivity. Edges whose endpoints both lie on a crack
  /// segment become boundary faces, one per adjacent cell.
  static Mesh from_cells(std::vector<Point> vertices,
                         std::vector<std::array<int, 3>> cells,
                         std::vector<CrackSegment> cracks = {});

  [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices_.size()); }
  [[nodiscard]] int num_cells() const { return static_cast<int>(cells_.size()); }
  [[nodiscard]] int num_faces() const { return static_cast<int>(faces_.size()); }
  [[nodiscard]] int num_interior_faces() const;
  [[nodiscard]] int num_boundary_faces() const { return num_faces() - num_interior_faces(); }

  [[nodiscard]] const Point& vertex(int v) const;
  [[nodiscard]] const std::array<int, 3>& cell(int c) const;
  [[nodiscard]] const Face& face(int f) const;
  [[nodiscard]] const std::array<CellFace, 3>& cell_faces(int c) const;

  [[nodiscard]] const std::vector<Point>& vertices() const { return vertices_; }
  [[nodiscard]] const std::vector<std::array<int, 3>>& cells() const { return cells_; }
  [[nodiscard]] const std::vector<Face>& faces() const { return faces_; }
  [[nodiscard]] const std::vector<CrackSegment>& cracks() const { return cracks_; }

  [[nodiscard]] double cell_area(int c) const;
  [[nodiscard]] double cell_diameter(int c) const;
  [[nodiscard]] Point cell_centroid(int c) const;
  [[nodiscard]] Point face_normal(int f) const;
  [[nodiscard]] Point outward_normal(int c, int local_face) const;
  [[nodiscard]] std::array<Point, 3> cell_points(int c) const;
  /// Endpoints of a face in its parametrization order.
  [[nodiscard]] std::array<Point, 2> face_points(int f) const;

  /// max_K h_K
  [[nodiscard]] double max_cell_diameter() const;
  [[nodiscard]] double total_area() const;

  /// Vertices sharing coordinates with another vertex (crack copies).
  [[nodiscard]] int num_duplicated_vertices() const;
  /// True if the vertex lies on the boundary (touches a boundary face).
  [[nodiscard]] const std::vector<char>& boundary_vertex_mask() const { return boundary_vertex_; }

 private:
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<Face> faces_;
  std::vector<std::array<CellFace, 3>> cell_faces_;
  std::vector<CrackSegment> cracks_;
  std::vector<char> boundary_vertex_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
};

/// 2n^2 triangles on (0,1)^2, squares cut along the positive-slope diagonal.
Mesh unit_square_mesh(int n);

/// (-1,1)^2 minus [0,1]x[-1,0] meshed as three n x n unit squares.
Mesh lshape_mesh(int n);

/// (-1/10,1/10)^2 with a slit along [0,1/10)x{0}; n must be even.
Mesh cracked_square_mesh(int n);

/// Red refinement; each face record gets its own midpoint, so slit facets
/// produce duplicated midpoints.
Mesh refine_uniform(const Mesh& mesh);

/// Geometric Euler characteristic V - E + C with duplicated vertices and
/// slit facets identified by coordinates.
int geometric_euler_characteristic(const Mesh& mesh);

/// Plain-text dump: `vertices x y`, `cells i j k`, `faces v0 v1 class`.
void write_mesh(std::ostream& os, const Mesh& mesh);

}  // namespace hdg
