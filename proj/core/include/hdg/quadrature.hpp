#pragma once

#include <array>
#include <vector>

namespace hdg {

/// Gauss-Legendre rule on [0,1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;  ///< sum to 1
  [[nodiscard]] int size() const { return static_cast<int>(points.size()); }
};

/// Rule on the reference triangle (0,0),(1,0),(0,1); points stored as
/// barycentric triples (lambda_0, lambda_1, lambda_2).
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;  ///< sum to 1/2 (reference area)
  [[nodiscard]] int size() const { return static_cast<int>(points.size()); }
};

/// n-point Gauss-Legendre rule (exact to degree 2n-1).
const LineRule& gauss_line(int n);

/// Smallest Gauss rule exact for polynomials of the given degree.
const LineRule& line_rule_for_degree(int degree);

/// Collapsed (Duffy) Gauss product rule exact for polynomials of the given
/// total degree.
const TriangleRule& triangle_rule(int degree);

}  // namespace hdg
