#pragma once

#include "chdg/field.hpp"

namespace chdg {

struct LimiterConfig {
  double phi_min = -1.0;
  double phi_max = 1.0;
  double tol_lim = 5e-16;  // added to |phibar - phi(x)|
  double tol_avg = 1e-14;  // alpha = 0 once the average is this close to a bound
  SampleMode samples = SampleMode::Quadrature;

  void validate() const;
};

struct CellLimit {
  Eigen::VectorXd coefficients;
  double alpha = 1.0;
};

/// Scaling limiter on one cell: modes 1.. are multiplied by alpha, the
/// average mode is left untouched.
CellLimit limit_cell(const Eigen::VectorXd& coefficients, const SampleSet& samples, const LimiterConfig& cfg);

/// Only the scaling factor.
double limiter_alpha(const Eigen::VectorXd& coefficients, const SampleSet& samples, const LimiterConfig& cfg);

struct LimitReport {
  double min_alpha = 1.0;
  std::size_t cells_limited = 0;  // cells with alpha < 1
};

DiscreteField limit_field(const DiscreteField& field, const LimiterConfig& cfg, LimitReport* report = nullptr);

}  // namespace chdg
