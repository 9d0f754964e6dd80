#include "hdg/basis.hpp"

#include <stdexcept>

namespace hdg {

namespace {
void check_degree(int degree) {
  if (degree < 0 || degree > 2) throw std::invalid_argument("Lagrange basis supports degree 0..2");
}
}  // namespace

int triangle_dim(int degree) {
  check_degree(degree);
  return (degree + 1) * (degree + 2) / 2;
}

Eigen::VectorXd triangle_shape(int degree, const Bary& l) {
  Eigen::VectorXd phi(triangle_dim(degree));
  switch (degree) {
    case 0:
      phi(0) = 1.0;
      break;
    case 1:
      phi << l[0], l[1], l[2];
      break;
    default:
      for (int i = 0; i < 3; ++i) {
        phi(i) = l[i] * (2.0 * l[i] - 1.0);
        phi(3 + i) = 4.0 * l[(i + 1) % 3] * l[(i + 2) % 3];
      }
  }
  return phi;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> triangle_shape_grad(int degree, const Bary& l,
                                                             const Eigen::Matrix<double, 3, 2>& g) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> grad(triangle_dim(degree), 2);
  switch (degree) {
    case 0:
      grad.setZero();
      break;
    case 1:
      grad = g;
      break;
    default:
      for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        grad.row(i) = (4.0 * l[i] - 1.0) * g.row(i);
        grad.row(3 + i) = 4.0 * (l[k] * g.row(j) + l[j] * g.row(k));
      }
  }
  return grad;
}

Bary triangle_node(int degree, int i) {
  if (i < 0 || i >= triangle_dim(degree)) throw std::out_of_range("triangle node index");
  if (degree == 0) return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  Bary l{0.0, 0.0, 0.0};
  if (i < 3) {
    l[i] = 1.0;
  } else {
    l[(i - 2) % 3] = 0.5;
    l[(i - 1) % 3] = 0.5;
  }
  return l;
}

int segment_dim(int degree) {
  check_degree(degree);
  return degree + 1;
}

Eigen::VectorXd segment_shape(int degree, double t) {
  Eigen::VectorXd phi(segment_dim(degree));
  switch (degree) {
    case 0:
      phi(0) = 1.0;
      break;
    case 1:
      phi << 1.0 - t, t;
      break;
    default:
      phi << (1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t);
  }
  return phi;
}

double segment_node(int degree, int i) {
  if (i < 0 || i >= segment_dim(degree)) throw std::out_of_range("segment node index");
  if (degree == 0) return 0.5;
  static constexpr double nodes[3] = {0.0, 1.0, 0.5};
  return nodes[i];
}

}  // namespace hdg
