#include "hdg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace hdg {

namespace {

// Returns (P_n(x), P_{n-1}(x)).
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, p0};
}

LineRule compute_gauss_legendre(int n) {
  // Newton iteration for the roots of P_n on [-1,1], mapped to [0,1].
  LineRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [pn, pm] = legendre(n, x);
      const double dx = pn / (n * (x * pn - pm) / (x * x - 1.0));
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [pn, pm] = legendre(n, x);
    const double dp = n * (x * pn - pm) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = 0.5 * (1.0 - x);
    rule.points[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.5;
  return rule;
}

TriangleRule compute_collapsed(int degree) {
  // x = s(1-t), y = t, dx dy = (1-t) ds dt; the t-integrand has degree deg+1.
  const int n = (degree + 2 + 1) / 2;
  const LineRule& g = gauss_line(n);
  TriangleRule rule;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double t = g.points[j];
      const double x = g.points[i] * (1.0 - t);
      const double y = t;
      rule.points.push_back({1.0 - x - y, x, y});
      rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - t));
    }
  }
  return rule;
}

std::mutex cache_mutex;

}  // namespace

const LineRule& gauss_line(int n) {
  if (n < 1 || n > 64) throw std::invalid_argument("gauss_line: n must be in [1,64]");
  static std::map<int, LineRule> cache;
  std::lock_guard lock(cache_mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

const LineRule& line_rule_for_degree(int degree) {
  return gauss_line(std::max(1, (degree + 2) / 2));
}

const TriangleRule& triangle_rule(int degree) {
  if (degree < 0 || degree > 60) throw std::invalid_argument("triangle_rule: unsupported degree");
  static std::map<int, TriangleRule> cache;
  {
    std::lock_guard lock(cache_mutex);
    auto it = cache.find(degree);
    if (it != cache.end()) return it->second;
  }
  TriangleRule rule = compute_collapsed(degree);
  std::lock_guard lock(cache_mutex);
  return cache.emplace(degree, std::move(rule)).first->second;
}

}  // namespace hdg
