#include "chdg/manufactured.hpp"

#include <cmath>
#include <numbers>

namespace chdg {

namespace {
constexpr double kWave = 4.0 * std::numbers::pi;
}

double TrigSolution::value(const Vec2& x) const {
  return amplitude * std::cos(kWave * x.x()) * std::cos(kWave * x.y());
}

Vec2 TrigSolution::gradient(const Vec2& x) const {
  const double cx = std::cos(kWave * x.x()), sx = std::sin(kWave * x.x());
  const double cy = std::cos(kWave * x.y()), sy = std::sin(kWave * x.y());
  return Vec2(-amplitude * kWave * sx * cy, -amplitude * kWave * cx * sy);
}

double TrigSolution::laplacian(const Vec2& x) const { return -2.0 * kWave * kWave * value(x); }

double TrigSolution::source(const Vec2& x) const {
  // W'(phi) - Cn^2 lap phi = phi^3 + c1 phi with c1 = 2 Cn^2 k^2 - 1.
  const double phi = value(x);
  const double lap = laplacian(x);
  const double grad2 = gradient(x).squaredNorm();
  const double c1 = 2.0 * cn * cn * kWave * kWave - 1.0;
  const double dg = 3.0 * phi * phi + c1;  // g'(phi)
  // div(M grad g) = M' g' |grad phi|^2 + M (g' lap phi + g'' |grad phi|^2)
  const double mob = 1.0 - phi * phi;
  const double flux_div = -2.0 * phi * dg * grad2 + mob * (dg * lap + 6.0 * phi * grad2);
  return -flux_div / pe;
}

ScalarFunction TrigSolution::value_fn() const {
  return [s = *this](const Vec2& x) { return s.value(x); };
}

VectorFunction TrigSolution::gradient_fn() const {
  return [s = *this](const Vec2& x) { return s.gradient(x); };
}

ScalarFunction TrigSolution::source_fn() const {
  return [s = *this](const Vec2& x) { return s.source(x); };
}

}  // namespace chdg
