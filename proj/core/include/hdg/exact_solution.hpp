#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "hdg/mesh.hpp"

namespace hdg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Closed-form Stokes solution. Points on a slit are ambiguous; `side` is a
/// point in the adjacent cell (typically its centroid) and selects the branch.
class ExactSolution {
 public:
  virtual ~ExactSolution() = default;

  [[nodiscard]] virtual Vec2 velocity(const Point& x, const Point& side) const = 0;
  /// grad(u)(i, j) = d u_i / d x_j
  [[nodiscard]] virtual Mat2 velocity_gradient(const Point& x, const Point& side) const = 0;
  [[nodiscard]] virtual double pressure(const Point& x, const Point& side) const = 0;
  [[nodiscard]] virtual Vec2 body_force(const Point& x) const = 0;

  [[nodiscard]] virtual double viscosity() const { return 1.0; }
  [[nodiscard]] virtual std::vector<Point> singular_points() const { return {}; }
  /// True when the body force is a gradient, so its divergence-free part vanishes.
  [[nodiscard]] virtual bool helmholtz_projection_is_zero() const { return true; }
  [[nodiscard]] virtual std::string name() const = 0;

  [[nodiscard]] Vec2 velocity(const Point& x) const { return velocity(x, x); }
  [[nodiscard]] Mat2 velocity_gradient(const Point& x) const { return velocity_gradient(x, x); }
  [[nodiscard]] double pressure(const Point& x) const { return pressure(x, x); }
};

}  // namespace hdg
