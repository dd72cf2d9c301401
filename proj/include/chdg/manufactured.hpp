#pragma once

#include "chdg/field.hpp"

namespace chdg {

/// Stationary trigonometric profile phi_I = A cos(k x) cos(k y), k = 4 pi,
/// and the source that makes it an exact steady state of the continuous
/// problem with degenerate mobility.
struct TrigSolution {
  double amplitude = 0.1;
  double cn = 0.1;
  double pe = 0.3;

  double value(const Vec2& x) const;
  Vec2 gradient(const Vec2& x) const;
  double laplacian(const Vec2& x) const;
  /// S = -Pe^{-1} div(M(phi) grad(W'(phi) - Cn^2 lap phi)), closed form.
  double source(const Vec2& x) const;

  ScalarFunction value_fn() const;
  VectorFunction gradient_fn() const;
  ScalarFunction source_fn() const;
};

}  // namespace chdg
