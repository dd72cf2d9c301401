#include "chdg/limiter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chdg {

void LimiterConfig::validate() const {
  if (!(phi_min < phi_max)) throw std::invalid_argument("LimiterConfig: phi_min must be below phi_max");
  if (!(tol_lim > 0.0) || !(tol_avg > 0.0)) throw std::invalid_argument("LimiterConfig: tolerances must be positive");
}

double limiter_alpha(const Eigen::VectorXd& c, const SampleSet& samples, const LimiterConfig& cfg) {
  if (c.size() <= 1) return 1.0;
  const double mean = c[0];
  if (mean > cfg.phi_max - cfg.tol_avg || mean < cfg.phi_min + cfg.tol_avg) return 0.0;
  const Eigen::VectorXd v = samples.values * c;
  double alpha = 1.0;
  for (Eigen::Index s = 0; s < v.size(); ++s) {
    const double dev = v[s] - mean;
    // Each point is measured against the bound it moves toward.
    const double room = dev > 0.0 ? cfg.phi_max - mean : mean - cfg.phi_min;
    alpha = std::min(alpha, std::abs(room) / (std::abs(dev) + cfg.tol_lim));
  }
  return alpha;
}

CellLimit limit_cell(const Eigen::VectorXd& c, const SampleSet& samples, const LimiterConfig& cfg) {
  CellLimit out{c, limiter_alpha(c, samples, cfg)};
  if (out.alpha < 1.0) out.coefficients.tail(c.size() - 1) *= out.alpha;
  return out;
}

DiscreteField limit_field(const DiscreteField& field, const LimiterConfig& cfg, LimitReport* report) {
  cfg.validate();
  DiscreteField out = field;
  LimitReport rep;
  if (field.space().dofs_per_cell() > 1) {
    const SampleSet samples = make_sample_set(field.space().basis(), cfg.samples);
    for (std::size_t k = 0; k < field.space().num_cells(); ++k) {
      const double alpha = limiter_alpha(field.cell_coefficients(k), samples, cfg);
      if (alpha < 1.0) {
        out.cell_coefficients(k).tail(out.cell_coefficients(k).size() - 1) *= alpha;
        ++rep.cells_limited;
      }
      rep.min_alpha = std::min(rep.min_alpha, alpha);
    }
  }
  if (report) *report = rep;
  return out;
}

}  // namespace chdg
