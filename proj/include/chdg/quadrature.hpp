#pragma once

#include "chdg/mesh.hpp"

#include <vector>

namespace chdg {

/// Quadrature on a reference element: the unit interval [0, 1], the unit
/// square [0, 1]^2 or the unit right triangle {x, y >= 0, x + y <= 1}.
/// For the interval the second point coordinate is unused (zero).
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Highest exactness degree available from make_quadrature / make_face_quadrature.
inline constexpr int kMaxQuadratureDegree = 41;

/// n-point Gauss-Legendre rule on [0, 1], exact for degree 2n - 1.
QuadratureRule gauss_legendre(int n);

/// Tensor Gauss-Legendre on quads; collapsed (Duffy) Gauss product rule on
/// triangles. Throws std::invalid_argument above kMaxQuadratureDegree.
QuadratureRule make_quadrature(CellType type, int degree);

/// Gauss-Legendre on the reference interval [0, 1].
QuadratureRule make_face_quadrature(int degree);

}  // namespace chdg
