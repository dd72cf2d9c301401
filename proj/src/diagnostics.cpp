#include "chdg/diagnostics.hpp"

#include "chdg/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chdg {

std::pair<double, double> energy_parts(const DGForms& forms, const DiscreteField& phi, double cn,
                                       double eta_laplace) {
  const auto& space = phi.space();
  const auto& basis = space.basis();
  const auto rule = projection_rule(basis);
  Eigen::MatrixXd table(static_cast<Eigen::Index>(rule.size()), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t q = 0; q < rule.size(); ++q) table.row(static_cast<Eigen::Index>(q)) = basis.values(rule.points[q]);
  double bulk = 0.0;
  for (std::size_t k = 0; k < space.num_cells(); ++k) {
    const double det = std::abs(space.mesh().cell(k).jacobian.determinant());
    const Eigen::VectorXd v = table * phi.cell_coefficients(k);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      bulk += rule.weights[q] * det * potential_terms(v[static_cast<Eigen::Index>(q)]).w;
    }
  }
  return {bulk / cn, forms.laplace(phi, phi, eta_laplace)};
}

double energy(const DGForms& forms, const DiscreteField& phi, double cn, double eta_laplace) {
  const auto [bulk, a] = energy_parts(forms, phi, cn, eta_laplace);
  return bulk + 0.5 * cn * a;
}

double energy_cn2_weight(const DGForms& forms, const DiscreteField& phi, double cn, double eta_laplace) {
  const auto [bulk, a] = energy_parts(forms, phi, cn, eta_laplace);
  return bulk + 0.5 * cn * cn * a;
}

double dg_seminorm(const DGForms& forms, const DiscreteField& v, const MobilityCoefficients& mob) {
  return forms.dg_seminorm_squared(mob, v);
}

BoundReport bound_report(const DiscreteField& field, const SampleSet& samples) {
  BoundReport rep;
  for (std::size_t k = 0; k < field.space().num_cells(); ++k) {
    const Eigen::VectorXd v = samples.values * field.cell_coefficients(k);
    for (Eigen::Index s = 0; s < v.size(); ++s) {
      const double viol = std::abs(v[s]) - 1.0;
      if (viol > rep.violation) {
        rep.violation = viol;
        rep.cell = k;
        rep.point = samples.points[static_cast<std::size_t>(s)];
      }
    }
  }
  return rep;
}

CoercivityReport coercivity_probe(const DGForms& forms, double eta, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("coercivity_probe: trials must be >= 1");
  const auto& space = forms.space();
  const auto& mesh = space.mesh();
  int m = 0;
  for (int c : mesh.cell_face_counts()) m = std::max(m, c);
  CoercivityReport rep;
  rep.trials = trials;
  rep.face_factor = eta - m * trace_constant(space.order());
  rep.worst_margin = std::numeric_limits<double>::infinity();
  rep.worst_semipositivity = std::numeric_limits<double>::infinity();

  Rng rng(seed);
  auto sp = forms.space_ptr();
  for (int t = 0; t < trials; ++t) {
    DiscreteField phi(sp), v(sp);
    for (std::size_t k = 0; k < space.num_cells(); ++k) {
      // Some averages beyond +-1 so that degenerate cells and faces occur.
      phi(k, 0) = rng.uniform(-1.2, 1.2);
      for (std::size_t j = 0; j < space.dofs_per_cell(); ++j) v(k, j) = rng.uniform(-1.0, 1.0);
    }
    const auto mob = forms.mobility_of(phi);
    const double b = forms.swip(mob, v, v, eta);
    const auto [vol, jump] = forms.dg_seminorm_parts(mob, v);
    rep.worst_margin = std::min(rep.worst_margin, b - (0.5 * vol + rep.face_factor * jump));
    rep.worst_semipositivity = std::min(rep.worst_semipositivity, b / v.coefficients().squaredNorm());
  }
  return rep;
}

DiagnosticsRow make_row(const CoupledState& state, const DGForms& forms, const SchemeParams& params,
                        const SampleSet& samples, const NewtonReport& newton) {
  DiagnosticsRow row;
  row.step = state.step;
  row.time = state.time;
  row.energy = energy(forms, state.phi, params.cn, params.eta_laplace);
  row.mass = mass(state.phi);
  std::tie(row.min_sample, row.max_sample) = sample_extrema(state.phi, samples);
  row.min_avg = std::numeric_limits<double>::infinity();
  row.max_avg = -row.min_avg;
  for (std::size_t k = 0; k < state.phi.space().num_cells(); ++k) {
    row.min_avg = std::min(row.min_avg, state.phi(k, 0));
    row.max_avg = std::max(row.max_avg, state.phi(k, 0));
  }
  row.newton_iters = newton.iterations;
  row.residual = newton.residual_norm;
  row.violation = std::max({row.max_sample - 1.0, -1.0 - row.min_sample, 0.0});
  return row;
}

}  // namespace chdg
