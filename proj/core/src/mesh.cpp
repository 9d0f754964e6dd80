#include "hdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>

namespace hdg {

namespace {

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

bool point_on_segment(const Point& p, const CrackSegment& s) {
  const Point d = s.b - s.a;
  const Point r = p - s.a;
  const double len2 = d.squaredNorm();
  const double tol = 1e-12 * len2;
  const double cross = d.x() * r.y() - d.y() * r.x();
  if (std::abs(cross) > tol) return false;
  const double t = d.dot(r);
  return t >= -tol && t <= len2 + tol;
}

bool edge_on_crack(const Point& a, const Point& b, const std::vector<CrackSegment>& cracks) {
  return std::any_of(cracks.begin(), cracks.end(), [&](const CrackSegment& s) {
    return point_on_segment(a, s) && point_on_segment(b, s);
  });
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

Mesh Mesh::from_cells(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells,
                      std::vector<CrackSegment> cracks) {
  Mesh m;
  m.vertices_ = std::move(vertices);
  m.cells_ = std::move(cells);
  m.cracks_ = std::move(cracks);

  const int nv = m.num_vertices();
  const int nc = m.num_cells();
  m.areas_.resize(nc);
  m.diameters_.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const auto& cell = m.cells_[c];
    for (int v : cell) {
      if (v < 0 || v >= nv) throw MeshError("cell " + std::to_string(c) + " references invalid vertex");
    }
    const auto& a = m.vertices_[cell[0]];
    const auto& b = m.vertices_[cell[1]];
    const auto& d = m.vertices_[cell[2]];
    const double area = signed_area(a, b, d);
    if (!(area > 0.0)) throw MeshError("cell " + std::to_string(c) + " has non-positive signed area");
    m.areas_[c] = area;
    m.diameters_[c] = std::max({(a - b).norm(), (b - d).norm(), (d - a).norm()});
  }

  // Collect (cell, local) pairs per vertex pair; first-seen order is deterministic.
  std::unordered_map<std::uint64_t, int> edge_slot;
  std::vector<std::vector<FaceParent>> edge_parents;
  std::vector<std::array<int, 2>> edge_vertices;
  edge_slot.reserve(3 * static_cast<std::size_t>(nc));
  for (int c = 0; c < nc; ++c) {
    for (int lf = 0; lf < 3; ++lf) {
      const int a = m.cells_[c][(lf + 1) % 3];
      const int b = m.cells_[c][(lf + 2) % 3];
      auto [it, inserted] = edge_slot.try_emplace(edge_key(a, b), static_cast<int>(edge_parents.size()));
      if (inserted) {
        edge_parents.emplace_back();
        edge_vertices.push_back({std::min(a, b), std::max(a, b)});
      }
      edge_parents[it->second].push_back({c, lf});
    }
  }

  m.cell_faces_.assign(nc, {});
  auto add_face = [&](const std::array<int, 2>& verts, std::vector<FaceParent> parents, bool on_crack) {
    Face f;
    f.vertices = verts;
    f.num_parents = static_cast<int>(parents.size());
    for (int i = 0; i < f.num_parents; ++i) f.parents[i] = parents[i];
    f.kind = f.num_parents == 2 ? FaceKind::Interior : FaceKind::Boundary;
    f.on_crack = on_crack;
    const Point& pa = m.vertices_[verts[0]];
    const Point& pb = m.vertices_[verts[1]];
    const Point t = pb - pa;
    f.diameter = t.norm();
    Point n(t.y(), -t.x());
    n /= f.diameter;
    const Point mid = 0.5 * (pa + pb);
    if (n.dot(mid - m.cell_centroid(parents[0].cell)) < 0.0) n = -n;
    f.normal = n;
    const int id = static_cast<int>(m.faces_.size());
    for (int i = 0; i < f.num_parents; ++i) {
      m.cell_faces_[parents[i].cell][parents[i].local] = CellFace{id, i == 0 ? 1 : -1};
    }
    m.faces_.push_back(f);
  };

  for (std::size_t e = 0; e < edge_parents.size(); ++e) {
    auto& parents = edge_parents[e];
    if (parents.size() > 2) throw MeshError("non-manifold edge");
    std::sort(parents.begin(), parents.end(),
              [](const FaceParent& x, const FaceParent& y) { return x.cell < y.cell; });
    const auto& verts = edge_vertices[e];
    const bool on_crack =
        !m.cracks_.empty() && edge_on_crack(m.vertices_[verts[0]], m.vertices_[verts[1]], m.cracks_);
    if (parents.size() == 2 && on_crack) {
      add_face(verts, {parents[0]}, true);
      add_face(verts, {parents[1]}, true);
    } else {
      add_face(verts, parents, on_crack);
    }
  }

  m.boundary_vertex_.assign(nv, 0);
  for (const auto& f : m.faces_) {
    if (f.is_boundary()) {
      m.boundary_vertex_[f.vertices[0]] = 1;
      m.boundary_vertex_[f.vertices[1]] = 1;
    }
  }
  return m;
}

int Mesh::num_interior_faces() const {
  return static_cast<int>(
      std::count_if(faces_.begin(), faces_.end(), [](const Face& f) { return f.is_interior(); }));
}

const Point& Mesh::vertex(int v) const {
  if (v < 0 || v >= num_vertices()) throw std::out_of_range("vertex index out of range");
  return vertices_[v];
}

const std::array<int, 3>& Mesh::cell(int c) const {
  if (c < 0 || c >= num_cells()) throw std::out_of_range("cell index out of range");
  return cells_[c];
}

const Face& Mesh::face(int f) const {
  if (f < 0 || f >= num_faces()) throw std::out_of_range("face index out of range");
  return faces_[f];
}

const std::array<CellFace, 3>& Mesh::cell_faces(int c) const {
  if (c < 0 || c >= num_cells()) throw std::out_of_range("cell index out of range");
  return cell_faces_[c];
}

double Mesh::cell_area(int c) const {
  if (c < 0 || c >= num_cells()) throw std::out_of_range("cell index out of range");
  return areas_[c];
}

double Mesh::cell_diameter(int c) const {
  if (c < 0 || c >= num_cells()) throw std::out_of_range("cell index out of range");
  return diameters_[c];
}

Point Mesh::cell_centroid(int c) const {
  const auto& cell = this->cell(c);
  return (vertices_[cell[0]] + vertices_[cell[1]] + vertices_[cell[2]]) / 3.0;
}

Point Mesh::face_normal(int f) const { return face(f).normal; }

Point Mesh::outward_normal(int c, int local_face) const {
  if (local_face < 0 || local_face > 2) throw std::out_of_range("local face index out of range");
  const CellFace& cf = cell_faces(c)[local_face];
  return static_cast<double>(cf.sign) * faces_[cf.face].normal;
}

std::array<Point, 3> Mesh::cell_points(int c) const {
  const auto& cell = this->cell(c);
  return {vertices_[cell[0]], vertices_[cell[1]], vertices_[cell[2]]};
}

std::array<Point, 2> Mesh::face_points(int f) const {
  const auto& fc = face(f);
  return {vertices_[fc.vertices[0]], vertices_[fc.vertices[1]]};
}

double Mesh::max_cell_diameter() const {
  return diameters_.empty() ? 0.0 : *std::max_element(diameters_.begin(), diameters_.end());
}

double Mesh::total_area() const {
  double s = 0.0;
  for (double a : areas_) s += a;
  return s;
}

int Mesh::num_duplicated_vertices() const {
  std::map<std::pair<double, double>, int> seen;
  for (const auto& p : vertices_) ++seen[{p.x(), p.y()}];
  int dup = 0;
  for (const auto& [key, count] : seen) dup += count - 1;
  return dup;
}

Mesh unit_square_mesh(int n) {
  if (n < 1) throw MeshError("unit_square_mesh: n must be >= 1");
  std::vector<Point> verts;
  verts.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) verts.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> cells;
  cells.reserve(static_cast<std::size_t>(2 * n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Mesh::from_cells(std::move(verts), std::move(cells));
}

Mesh lshape_mesh(int n) {
  if (n < 1) throw MeshError("lshape_mesh: n must be >= 1");
  // Grid of (2n+1)^2 nodes on [-1,1]^2; squares in the lower-right quadrant are skipped.
  const int m = 2 * n;
  std::vector<int> node(static_cast<std::size_t>((m + 1) * (m + 1)), -1);
  std::vector<Point> verts;
  auto inside = [n](int i, int j) { return !(i >= n && j < n); };  // square (i,j) kept?
  auto touch = [&](int i, int j) {
    int& slot = node[static_cast<std::size_t>(j * (m + 1) + i)];
    if (slot < 0) {
      slot = static_cast<int>(verts.size());
      verts.emplace_back(static_cast<double>(i - n) / n, static_cast<double>(j - n) / n);
    }
    return slot;
  };
  std::vector<std::array<int, 3>> cells;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      if (!inside(i, j)) continue;
      const int a = touch(i, j), b = touch(i + 1, j), c = touch(i + 1, j + 1), d = touch(i, j + 1);
      cells.push_back({a, b, c});
      cells.push_back({a, c, d});
    }
  }
  return Mesh::from_cells(std::move(verts), std::move(cells));
}

Mesh cracked_square_mesh(int n) {
  if (n < 2 || n % 2 != 0) throw MeshError("cracked_square_mesh: n must be even and >= 2");
  const int half = n / 2;
  const double h = 0.2 / n;
  std::vector<Point> verts;
  verts.reserve(static_cast<std::size_t>((n + 1) * (n + 1) + half));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) verts.emplace_back((i - half) * h, (j - half) * h);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };

  // Lower copies of nodes strictly inside the slit (i in (half, n), j = half).
  std::vector<int> lower(static_cast<std::size_t>(n + 1), -1);
  for (int i = half + 1; i < n; ++i) {
    lower[i] = static_cast<int>(verts.size());
    verts.push_back(verts[id(i, half)]);
  }

  std::vector<std::array<int, 3>> cells;
  cells.reserve(static_cast<std::size_t>(2 * n * n));
  for (int j = 0; j < n; ++j) {
    const bool below = j < half;
    auto vid = [&](int i, int jj) {
      if (below && jj == half && lower[i] >= 0) return lower[i];
      return id(i, jj);
    };
    for (int i = 0; i < n; ++i) {
      cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      cells.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  std::vector<CrackSegment> cracks{{Point(0.0, 0.0), Point(0.1, 0.0)}};
  return Mesh::from_cells(std::move(verts), std::move(cells), std::move(cracks));
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Point> verts = mesh.vertices();
  std::vector<int> midpoint(static_cast<std::size_t>(mesh.num_faces()));
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto [a, b] = mesh.face_points(f);
    midpoint[f] = static_cast<int>(verts.size());
    verts.push_back(0.5 * (a + b));
  }
  std::vector<std::array<int, 3>> cells;
  cells.reserve(static_cast<std::size_t>(4 * mesh.num_cells()));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& v = mesh.cell(c);
    const auto& cf = mesh.cell_faces(c);
    const int m0 = midpoint[cf[0].face], m1 = midpoint[cf[1].face], m2 = midpoint[cf[2].face];
    cells.push_back({v[0], m2, m1});
    cells.push_back({m2, v[1], m0});
    cells.push_back({m1, m0, v[2]});
    cells.push_back({m0, m1, m2});
  }
  return Mesh::from_cells(std::move(verts), std::move(cells), mesh.cracks());
}

int geometric_euler_characteristic(const Mesh& mesh) {
  std::map<std::pair<double, double>, int> geo;
  std::vector<int> rep(static_cast<std::size_t>(mesh.num_vertices()));
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const auto& p = mesh.vertex(v);
    auto [it, inserted] = geo.try_emplace({p.x(), p.y()}, static_cast<int>(geo.size()));
    rep[v] = it->second;
  }
  std::map<std::pair<int, int>, int> edges;
  for (const auto& cell : mesh.cells()) {
    for (int lf = 0; lf < 3; ++lf) {
      int a = rep[cell[(lf + 1) % 3]], b = rep[cell[(lf + 2) % 3]];
      if (a > b) std::swap(a, b);
      edges[{a, b}] = 1;
    }
  }
  return static_cast<int>(geo.size()) - static_cast<int>(edges.size()) + mesh.num_cells();
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  const auto prec = os.precision(17);
  for (const auto& p : mesh.vertices()) os << "vertices " << p.x() << ' ' << p.y() << '\n';
  for (const auto& c : mesh.cells()) os << "cells " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  for (const auto& f : mesh.faces()) {
    os << "faces " << f.vertices[0] << ' ' << f.vertices[1] << ' '
       << (f.is_interior() ? "interior" : "boundary") << '\n';
  }
  os.precision(prec);
}

}  // namespace hdg
