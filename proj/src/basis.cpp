#include "chdg/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace chdg {

namespace {

// Legendre P_n(t) and P_n'(t) for n = 0..order; safe at t = +-1.
void legendre_table(int order, double t, std::vector<double>& p, std::vector<double>& dp) {
  p.assign(static_cast<std::size_t>(order) + 1, 0.0);
  dp.assign(static_cast<std::size_t>(order) + 1, 0.0);
  p[0] = 1.0;
  if (order == 0) return;
  p[1] = t;
  dp[1] = 1.0;
  for (int n = 1; n < order; ++n) {
    const auto k = static_cast<std::size_t>(n);
    p[k + 1] = ((2.0 * n + 1.0) * t * p[k] - n * p[k - 1]) / (n + 1.0);
    dp[k + 1] = dp[k - 1] + (2.0 * n + 1.0) * p[k];
  }
}

// Jacobi polynomial P_n^{(a,b)}(r).
double jacobi(int n, double a, double b, double r) {
  if (n == 0) return 1.0;
  double p0 = 1.0;
  double p1 = 0.5 * (a - b + (a + b + 2.0) * r);
  for (int k = 1; k < n; ++k) {
    const double c = 2.0 * k + a + b;
    const double a1 = 2.0 * (k + 1) * (k + a + b + 1.0) * c;
    const double a2 = (c + 1.0) * (a * a - b * b);
    const double a3 = c * (c + 1.0) * (c + 2.0);
    const double a4 = 2.0 * (k + a) * (k + b) * (c + 2.0);
    const double p2 = ((a2 + a3 * r) * p1 - a4 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double jacobi_derivative(int n, double a, double b, double r) {
  if (n == 0) return 0.0;
  return 0.5 * (n + a + b + 1.0) * jacobi(n - 1, a + 1.0, b + 1.0, r);
}

}  // namespace

ReferenceBasis::ReferenceBasis(CellType type, int order) : type_(type), order_(order) {
  if (order < 0) throw std::invalid_argument("basis: polynomial order must be >= 0");
  for (int d = 0; d <= (type == CellType::Quad ? 2 * order : order); ++d) {
    for (int i = d; i >= 0; --i) {
      const int j = d - i;
      if (i <= order && j <= order) modes_.emplace_back(i, j);
    }
  }
  scale_.assign(modes_.size(), 1.0);

  volume_rule_ = make_quadrature(type, volume_quadrature_degree(order));
  face_rule_ = make_face_quadrature(face_quadrature_degree(order));

  const std::size_t n = modes_.size();
  if (type == CellType::Tri) {
    // Dubiner modes are orthogonal but not normalized; fix the scale by
    // quadrature of degree 2p (exact with the volume rule).
    std::vector<double> norm2(n, 0.0);
    Eigen::VectorXd v(n);
    for (std::size_t q = 0; q < volume_rule_.size(); ++q) {
      evaluate(volume_rule_.points[q], v.data(), nullptr, nullptr);
      for (std::size_t i = 0; i < n; ++i) norm2[i] += volume_rule_.weights[q] * v[i] * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) scale_[i] = std::sqrt(reference_measure() / norm2[i]);
  }

  volume_values_.resize(static_cast<Eigen::Index>(volume_rule_.size()), static_cast<Eigen::Index>(n));
  volume_gradients_.reserve(volume_rule_.size());
  for (std::size_t q = 0; q < volume_rule_.size(); ++q) {
    volume_values_.row(static_cast<Eigen::Index>(q)) = values(volume_rule_.points[q]).transpose();
    volume_gradients_.push_back(gradients(volume_rule_.points[q]));
  }
}

void ReferenceBasis::evaluate(const Vec2& ref, double* values, double* dx, double* dy) const {
  const double x = ref.x();
  const double y = ref.y();
  const std::size_t n = modes_.size();

  if (type_ == CellType::Quad) {
    std::vector<double> px, dpx, py, dpy;
    legendre_table(order_, 2.0 * x - 1.0, px, dpx);
    legendre_table(order_, 2.0 * y - 1.0, py, dpy);
    for (std::size_t k = 0; k < n; ++k) {
      const auto [a, b] = modes_[k];
      const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
      const double c = std::sqrt((2.0 * a + 1.0) * (2.0 * b + 1.0));
      if (values) values[k] = c * px[ua] * py[ub];
      if (dx) dx[k] = c * 2.0 * dpx[ua] * py[ub];
      if (dy) dy[k] = c * px[ua] * 2.0 * dpy[ub];
    }
    return;
  }

  // q_i = (1 - y)^i P_i(2x / (1 - y) - 1), built by a recurrence that is
  // regular at the collapsed vertex y = 1.
  const double z = 2.0 * x + y - 1.0;
  const double s = 1.0 - y;
  const auto np1 = static_cast<std::size_t>(order_) + 1;
  std::vector<double> q(np1), qx(np1), qy(np1);
  q[0] = 1.0;
  qx[0] = qy[0] = 0.0;
  if (order_ >= 1) {
    q[1] = z;
    qx[1] = 2.0;
    qy[1] = 1.0;
  }
  for (std::size_t m = 1; m + 1 < np1; ++m) {
    const double md = static_cast<double>(m);
    q[m + 1] = ((2 * md + 1) * z * q[m] - md * s * s * q[m - 1]) / (md + 1);
    qx[m + 1] = ((2 * md + 1) * (2.0 * q[m] + z * qx[m]) - md * s * s * qx[m - 1]) / (md + 1);
    qy[m + 1] = ((2 * md + 1) * (q[m] + z * qy[m]) - md * (-2.0 * s * q[m - 1] + s * s * qy[m - 1])) /
                (md + 1);
  }
  const double r = 2.0 * y - 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto [i, j] = modes_[k];
    const auto ui = static_cast<std::size_t>(i);
    const double alpha = 2.0 * i + 1.0;
    const double pj = jacobi(j, alpha, 0.0, r);
    const double dpj = 2.0 * jacobi_derivative(j, alpha, 0.0, r);
    const double c = scale_[k];
    if (values) values[k] = c * q[ui] * pj;
    if (dx) dx[k] = c * qx[ui] * pj;
    if (dy) dy[k] = c * (qy[ui] * pj + q[ui] * dpj);
  }
}

Eigen::VectorXd ReferenceBasis::values(const Vec2& ref) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
  evaluate(ref, v.data(), nullptr, nullptr);
  return v;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> ReferenceBasis::gradients(const Vec2& ref) const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::VectorXd dx(n), dy(n);
  evaluate(ref, nullptr, dx.data(), dy.data());
  Eigen::Matrix<double, Eigen::Dynamic, 2> g(n, 2);
  g.col(0) = dx;
  g.col(1) = dy;
  return g;
}

std::shared_ptr<const ReferenceBasis> make_basis(CellType type, int order) {
  return std::make_shared<const ReferenceBasis>(type, order);
}

}  // namespace chdg
