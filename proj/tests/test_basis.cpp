#include "chdg/basis.hpp"
#include "chdg/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace chdg;

namespace {

// int_0^1 int_0^1 x^a y^b
double square_monomial(int a, int b) { return 1.0 / ((a + 1) * (b + 1)); }

// int over the unit right triangle of x^a y^b = a! b! / (a + b + 2)!
double triangle_monomial(int a, int b) {
  return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3);
}

double integrate(const QuadratureRule& r, int a, int b) {
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * std::pow(r.points[q].x(), a) * std::pow(r.points[q].y(), b);
  return s;
}

}  // namespace

TEST_CASE("gauss legendre on the unit interval") {
  const auto r1 = make_face_quadrature(1);
  CHECK(r1.size() == 1);
  CHECK(r1.weights[0] == doctest::Approx(1.0));
  const auto r3 = make_face_quadrature(3);
  CHECK(r3.size() == 2);
  for (int k = 0; k <= 3; ++k) {
    double s = 0.0;
    for (std::size_t q = 0; q < r3.size(); ++q) s += r3.weights[q] * std::pow(r3.points[q].x(), k);
    CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
  }
  for (int n = 1; n <= 20; ++n) {
    const auto g = gauss_legendre(n);
    double sum = 0.0;
    for (double w : g.weights) {
      CHECK(w > 0.0);
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("volume rules integrate monomials up to their degree") {
  for (int deg : {1, 2, 4, 7, 12, 20}) {
    const auto sq = make_quadrature(CellType::Quad, deg);
    const auto tr = make_quadrature(CellType::Tri, deg);
    for (int a = 0; a <= deg; ++a) {
      for (int b = 0; a + b <= deg; ++b) {
        CHECK(integrate(sq, a, b) == doctest::Approx(square_monomial(a, b)).epsilon(1e-12));
        CHECK(integrate(tr, a, b) == doctest::Approx(triangle_monomial(a, b)).epsilon(1e-12));
      }
    }
  }
  const auto q4 = make_quadrature(CellType::Quad, 4);
  CHECK(integrate(q4, 2, 2) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("rule weights sum to the reference measure") {
  for (int deg = 0; deg <= kMaxQuadratureDegree; deg += 5) {
    double sq = 0.0, tr = 0.0;
    for (double w : make_quadrature(CellType::Quad, deg).weights) sq += w;
    for (double w : make_quadrature(CellType::Tri, deg).weights) tr += w;
    CHECK(std::abs(sq - 1.0) < 1e-14);
    CHECK(std::abs(tr - 0.5) < 1e-14);
  }
  CHECK_THROWS_AS(make_quadrature(CellType::Tri, kMaxQuadratureDegree + 1), std::invalid_argument);
}

TEST_CASE("triangle points lie inside the reference triangle") {
  const auto r = make_quadrature(CellType::Tri, 9);
  for (const auto& p : r.points) {
    CHECK(p.x() > 0.0);
    CHECK(p.y() > 0.0);
    CHECK(p.x() + p.y() < 1.0);
  }
}

TEST_CASE("basis sizes and the constant mode") {
  for (int p = 0; p <= 4; ++p) {
    const ReferenceBasis q(CellType::Quad, p), t(CellType::Tri, p);
    CHECK(q.size() == static_cast<std::size_t>((p + 1) * (p + 1)));
    CHECK(t.size() == static_cast<std::size_t>((p + 1) * (p + 2) / 2));
    for (const Vec2& x : {Vec2(0.1, 0.2), Vec2(0.7, 0.05)}) {
      CHECK(q.values(x)[0] == 1.0);
      CHECK(t.values(x)[0] == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("gram matrix equals the reference measure times identity") {
  for (CellType type : {CellType::Quad, CellType::Tri}) {
    for (int p = 0; p <= 4; ++p) {
      const ReferenceBasis b(type, p);
      const auto rule = make_quadrature(type, 2 * p + 2);
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(b.size(), b.size());
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto v = b.values(rule.points[q]);
        g += rule.weights[q] * v * v.transpose();
      }
      const Eigen::MatrixXd expected = b.reference_measure() * Eigen::MatrixXd::Identity(b.size(), b.size());
      CHECK((g - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("orthogonality survives random affine maps") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (CellType type : {CellType::Quad, CellType::Tri}) {
    const ReferenceBasis b(type, 3);
    const auto rule = make_quadrature(type, 8);
    for (int trial = 0; trial < 50; ++trial) {
      Mat2 j;
      j << u(gen), u(gen), u(gen), u(gen);
      if (std::abs(j.determinant()) < 0.1) continue;
      const double det = std::abs(j.determinant());
      const double measure = det * b.reference_measure();
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(b.size(), b.size());
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto v = b.values(rule.points[q]);
        g += rule.weights[q] * det * v * v.transpose();
      }
      g -= measure * Eigen::MatrixXd::Identity(b.size(), b.size());
      CHECK(g.cwiseAbs().maxCoeff() <= 1e-12 * measure);
    }
  }
}

TEST_CASE("gradients match central differences") {
  const double h = 1e-6;
  for (CellType type : {CellType::Quad, CellType::Tri}) {
    const ReferenceBasis b(type, 4);
    for (const Vec2& x : {Vec2(0.21, 0.33), Vec2(0.6, 0.1), Vec2(0.05, 0.8)}) {
      if (type == CellType::Tri && x.sum() >= 1.0) continue;
      const auto g = b.gradients(x);
      const Eigen::VectorXd dx = (b.values(x + Vec2(h, 0)) - b.values(x - Vec2(h, 0))) / (2 * h);
      const Eigen::VectorXd dy = (b.values(x + Vec2(0, h)) - b.values(x - Vec2(0, h))) / (2 * h);
      CHECK((g.col(0) - dx).cwiseAbs().maxCoeff() < 1e-6);
      CHECK((g.col(1) - dy).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("tabulated values and gradients agree with point evaluation") {
  const ReferenceBasis b(CellType::Tri, 2);
  const auto& r = b.volume_rule();
  CHECK(r.degree >= volume_quadrature_degree(2));
  CHECK(b.face_rule().degree >= face_quadrature_degree(2));
  for (std::size_t q = 0; q < r.size(); ++q) {
    CHECK((b.values_at_quadrature().row(q).transpose() - b.values(r.points[q])).norm() < 1e-15);
    CHECK((b.gradients_at_quadrature()[q] - b.gradients(r.points[q])).norm() < 1e-15);
  }
}

TEST_CASE("zero-mean modes vanish at the centroid for p = 1") {
  const ReferenceBasis q(CellType::Quad, 1), t(CellType::Tri, 1);
  for (std::size_t i = 1; i < q.size(); ++i) {
    // The bilinear mode of Q1 is zero at the centre as well.
    CHECK(std::abs(q.values(Vec2(0.5, 0.5))[i]) < 1e-15);
  }
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(std::abs(t.values(Vec2(1.0 / 3, 1.0 / 3))[i]) < 1e-15);
}

TEST_CASE("invalid basis order") {
  CHECK_THROWS_AS(ReferenceBasis(CellType::Quad, -1), std::invalid_argument);
}
