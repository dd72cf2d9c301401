#pragma once

#include "chdg/forms.hpp"
#include "chdg/newton.hpp"

#include <cstdint>

namespace chdg {

/// Cn^{-1} int W(phi) + (Cn / 2) a(phi, phi), i.e. Cn^{-1} times the
/// functional int W + (Cn^2 / 2) a that the time step dissipates.
double energy(const DGForms& forms, const DiscreteField& phi, double cn, double eta_laplace);

/// Cn^{-1} int W(phi) + (Cn^2 / 2) a(phi, phi). Not monotone under the
/// scheme unless Cn = 1; kept for comparison.
double energy_cn2_weight(const DGForms& forms, const DiscreteField& phi, double cn, double eta_laplace);

/// (Cn^{-1} int W(phi), a(phi, phi)).
std::pair<double, double> energy_parts(const DGForms& forms, const DiscreteField& phi, double cn,
                                       double eta_laplace);

/// Squared weighted DG seminorm of v.
double dg_seminorm(const DGForms& forms, const DiscreteField& v, const MobilityCoefficients& mob);

struct BoundReport {
  double violation = 0.0;  // max over samples of max{|value| - 1, 0}
  std::size_t cell = 0;
  Vec2 point = Vec2::Zero();  // reference coordinates
};

BoundReport bound_report(const DiscreteField& field, const SampleSet& samples);

struct CoercivityReport {
  int trials = 0;
  double worst_margin = 0.0;        // min of b - lower bound
  double worst_semipositivity = 0.0;  // min of b(M, v, v) / ||v||^2
  double face_factor = 0.0;         // eta - max_K m_K C_T
};

/// Randomized check of b(M,v,v) >= 1/2 ||sqrt(M) grad v||^2 + (eta - max m_K C_T) |v|_jump^2.
CoercivityReport coercivity_probe(const DGForms& forms, double eta, int trials, std::uint64_t seed);

struct DiagnosticsRow {
  int step = 0;
  double time = 0.0;
  double energy = 0.0;
  double mass = 0.0;
  double min_sample = 0.0;
  double max_sample = 0.0;
  double min_avg = 0.0;
  double max_avg = 0.0;
  int newton_iters = 0;
  double residual = 0.0;
  double violation = 0.0;
};

DiagnosticsRow make_row(const CoupledState& state, const DGForms& forms, const SchemeParams& params,
                        const SampleSet& samples, const NewtonReport& newton);

}  // namespace chdg
