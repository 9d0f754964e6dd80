#pragma once

#include <array>

#include <Eigen/Core>

namespace hdg {

/// Barycentric coordinates on a triangle.
using Bary = std::array<double, 3>;

/// Lagrange P_k (k = 0, 1, 2) on a triangle, nodes ordered vertices first,
/// then midpoints of the edges opposite vertex 0, 1, 2.
int triangle_dim(int degree);

/// Shape values at barycentric point `l`. Output vector has triangle_dim(k) entries.
Eigen::VectorXd triangle_shape(int degree, const Bary& l);

/// Physical gradients (rows = shape functions) given the constant barycentric
/// gradients of the cell (row i = grad lambda_i).
Eigen::Matrix<double, Eigen::Dynamic, 2> triangle_shape_grad(int degree, const Bary& l,
                                                             const Eigen::Matrix<double, 3, 2>& grad_bary);

/// Barycentric coordinates of node i of the P_k Lagrange element.
Bary triangle_node(int degree, int i);

/// Lagrange P_k on [0,1], nodes ordered (0, 1, 1/2).
int segment_dim(int degree);
Eigen::VectorXd segment_shape(int degree, double t);
double segment_node(int degree, int i);

}  // namespace hdg
