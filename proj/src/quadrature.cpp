#include "chdg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace chdg {

namespace {

// Returns (P_n(x), P_n'(x)) via the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  QuadratureRule rule;
  rule.degree = 2 * n - 1;
  rule.points.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre_with_derivative(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Roots come out in descending order; store ascending on [0, 1].
    const auto idx = static_cast<std::size_t>(n - 1 - i);
    rule.points[idx] = Vec2(0.5 * (x + 1.0), 0.0);
    rule.weights[idx] = 0.5 * w;
  }
  return rule;
}

namespace {

int points_for_degree(int degree) { return degree / 2 + 1; }

void check_degree(int degree) {
  if (degree < 0) throw std::invalid_argument("quadrature: negative degree");
  if (degree > kMaxQuadratureDegree) {
    throw std::invalid_argument("quadrature: degree " + std::to_string(degree) +
                                " not available (maximum " +
                                std::to_string(kMaxQuadratureDegree) + ")");
  }
}

}  // namespace

QuadratureRule make_face_quadrature(int degree) {
  check_degree(degree);
  return gauss_legendre(points_for_degree(degree));
}

QuadratureRule make_quadrature(CellType type, int degree) {
  check_degree(degree);
  QuadratureRule rule;
  if (type == CellType::Quad) {
    const auto g = gauss_legendre(points_for_degree(degree));
    rule.degree = g.degree;
    for (std::size_t j = 0; j < g.size(); ++j) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        rule.points.emplace_back(g.points[i].x(), g.points[j].x());
        rule.weights.push_back(g.weights[i] * g.weights[j]);
      }
    }
    return rule;
  }
  // Collapsed coordinates: x = u (1 - v), y = v, dx dy = (1 - v) du dv.
  const auto gu = gauss_legendre(points_for_degree(degree));
  const auto gv = gauss_legendre(points_for_degree(degree + 1));
  rule.degree = std::min(gu.degree, gv.degree - 1);
  for (std::size_t j = 0; j < gv.size(); ++j) {
    const double v = gv.points[j].x();
    for (std::size_t i = 0; i < gu.size(); ++i) {
      const double u = gu.points[i].x();
      rule.points.emplace_back(u * (1.0 - v), v);
      rule.weights.push_back(gu.weights[i] * gv.weights[j] * (1.0 - v));
    }
  }
  return rule;
}

}  // namespace chdg
