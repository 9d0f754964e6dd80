#pragma once

// Exact polynomial arithmetic in two variables, used as an integration oracle
// that shares no code with the library's quadrature or basis modules.

#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

class Poly2 {
 public:
  using Key = std::pair<int, int>;

  Poly2() = default;
  explicit Poly2(double c) {
    if (c != 0.0) terms_[{0, 0}] = c;
  }
  static Poly2 monomial(int a, int b, double c = 1.0) {
    Poly2 p;
    p.terms_[{a, b}] = c;
    return p;
  }
  static Poly2 linear(double c, double cx, double cy) {
    return Poly2(c) + monomial(1, 0, cx) + monomial(0, 1, cy);
  }

  Poly2 operator+(const Poly2& o) const {
    Poly2 r = *this;
    for (const auto& [k, v] : o.terms_) r.terms_[k] += v;
    return r;
  }
  Poly2 operator-(const Poly2& o) const { return *this + o * -1.0; }
  Poly2 operator*(double s) const {
    Poly2 r;
    for (const auto& [k, v] : terms_) r.terms_[k] = v * s;
    return r;
  }
  Poly2 operator*(const Poly2& o) const {
    Poly2 r;
    for (const auto& [k1, v1] : terms_)
      for (const auto& [k2, v2] : o.terms_) r.terms_[{k1.first + k2.first, k1.second + k2.second}] += v1 * v2;
    return r;
  }

  double operator()(double x, double y) const {
    double s = 0.0;
    for (const auto& [k, v] : terms_) s += v * std::pow(x, k.first) * std::pow(y, k.second);
    return s;
  }

  Poly2 dx() const {
    Poly2 r;
    for (const auto& [k, v] : terms_)
      if (k.first > 0) r.terms_[{k.first - 1, k.second}] += v * k.first;
    return r;
  }
  Poly2 dy() const {
    Poly2 r;
    for (const auto& [k, v] : terms_)
      if (k.second > 0) r.terms_[{k.first, k.second - 1}] += v * k.second;
    return r;
  }

  /// p(X(s,t), Y(s,t)) for affine X, Y.
  Poly2 compose(const Poly2& X, const Poly2& Y) const {
    Poly2 r;
    for (const auto& [k, v] : terms_) {
      Poly2 m(v);
      for (int i = 0; i < k.first; ++i) m = m * X;
      for (int i = 0; i < k.second; ++i) m = m * Y;
      r = r + m;
    }
    return r;
  }

  /// Integral over the reference triangle {s, t >= 0, s + t <= 1}.
  double integrate_reference_triangle() const {
    double s = 0.0;
    for (const auto& [k, v] : terms_) s += v * fact(k.first) * fact(k.second) / fact(k.first + k.second + 2);
    return s;
  }
  /// Integral over s in [0, 1] of a polynomial in s alone.
  double integrate_unit_interval() const {
    double s = 0.0;
    for (const auto& [k, v] : terms_)
      if (k.second == 0) s += v / (k.first + 1);
    return s;
  }

 private:
  static double fact(int n) { return n <= 1 ? 1.0 : n * fact(n - 1); }
  std::map<Key, double> terms_;
};

using Pt = std::array<double, 2>;

/// P_k Lagrange basis on a physical triangle from a monomial Vandermonde
/// solve; nodes are the vertices, then midpoints opposite vertex 0, 1, 2.
inline std::vector<Poly2> lagrange_triangle(int k, const std::array<Pt, 3>& v) {
  std::vector<Pt> nodes(v.begin(), v.end());
  if (k == 2)
    for (int i = 0; i < 3; ++i) {
      const Pt& a = v[(i + 1) % 3];
      const Pt& b = v[(i + 2) % 3];
      nodes.push_back({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])});
    }
  std::vector<std::pair<int, int>> mono;
  for (int d = 0; d <= k; ++d)
    for (int a = d; a >= 0; --a) mono.emplace_back(a, d - a);
  const int n = static_cast<int>(mono.size());
  if (k == 0) return {Poly2(1.0)};
  Eigen::MatrixXd V(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) V(i, j) = std::pow(nodes[i][0], mono[j].first) * std::pow(nodes[i][1], mono[j].second);
  const Eigen::MatrixXd C = V.inverse();
  std::vector<Poly2> out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i] = out[i] + Poly2::monomial(mono[j].first, mono[j].second, C(j, i));
  return out;
}

/// P_k Lagrange basis on [0, 1] in the variable s, nodes (0, 1, 1/2).
inline std::vector<Poly2> lagrange_segment(int k) {
  const std::vector<double> nodes = k == 1 ? std::vector<double>{0.0, 1.0} : std::vector<double>{0.0, 1.0, 0.5};
  std::vector<Poly2> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Poly2 p(1.0);
    for (std::size_t j = 0; j < nodes.size(); ++j)
      if (j != i) p = p * (Poly2::linear(-nodes[j], 1.0, 0.0) * (1.0 / (nodes[i] - nodes[j])));
    out.push_back(p);
  }
  return out;
}

}  // namespace oracle
