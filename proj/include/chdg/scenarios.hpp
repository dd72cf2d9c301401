#pragma once

#include "chdg/config.hpp"
#include "chdg/diagnostics.hpp"
#include "chdg/stepper.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace chdg {

enum class Scenario { TrigEoc, Spinodal, Merging };

Scenario parse_scenario(const std::string& name);
std::string to_string(Scenario s);

struct ScenarioConfig {
  Scenario scenario = Scenario::Spinodal;
  CellType mesh = CellType::Tri;
  int n = 32;  // cells per direction
  int p = 1;
  double pe = 1.0;
  double cn = 0.01;
  double tau = 1e-4;
  double t_end = 0.05;
  bool eta_auto = false;
  double eta = 6.0;  // penalty, or the floor when eta_auto
  bool limiter = true;
  SampleMode samples = SampleMode::Quadrature;
  double newton_tol = 1e-10;
  int newton_max_iters = 25;
  LinearMethod linear = LinearMethod::Auto;
  std::uint64_t seed = 42;
  double amplitude = 0.1;  // trig_eoc
  double a2 = 1e-8;        // merging
  std::vector<double> snapshots;  // times; empty for none
  std::string output_dir = "output";
  // EOC harness
  int levels = 3;
  bool caption_tau = false;  // tau_N = T 2^{-(N-20)/20} instead of halving

  void validate() const;
};

/// Defaults for one scenario (desk scale).
ScenarioConfig default_config(Scenario s);
/// Defaults of `scenario = ...` overridden by every other key. Unknown keys throw.
ScenarioConfig scenario_from_config(const Config& cfg);

/// Everything needed to time-step one configuration.
struct Simulation {
  ScenarioConfig config;
  std::shared_ptr<const MeshTopology> mesh;
  std::shared_ptr<const DGSpace> space;
  std::shared_ptr<const SwipdpScheme> scheme;
  SchemeParams params;
  StepperConfig stepper;
  SampleSet samples;
};

Simulation make_simulation(const ScenarioConfig& cfg);
/// Projected (and, with the limiter, limited) initial state.
CoupledState initial_state(const Simulation& sim);

int number_of_steps(double t_end, double tau);

struct RunObserver {
  std::function<void(const DiagnosticsRow&)> on_row;
  std::function<void(const CoupledState&)> on_snapshot;
};

struct RunResult {
  std::vector<DiagnosticsRow> rows;  // row 0 is the initial state
  std::optional<CoupledState> final_state;
  bool failed = false;
  std::string error;
};

/// Steps to t_end (or max_steps if positive). Solver failures end the run
/// with failed = true; rows recorded so far are kept.
RunResult run_simulation(const Simulation& sim, const RunObserver& observer = {}, int max_steps = 0);

struct EocRow {
  int n = 0;
  double tau = 0.0;
  int steps = 0;
  double l2 = 0.0;
  double l2_eoc = 0.0;  // NaN on the first row
  double h1 = 0.0;
  double h1_eoc = 0.0;
  bool failed = false;
  std::string error;
};

struct EocTable {
  int p = 0;
  double amplitude = 0.0;
  bool limiter = false;
  std::vector<EocRow> rows;
};

/// Refinement study: N doubles per level, tau halves (capped at T).
EocTable run_trig_eoc(const ScenarioConfig& cfg, int levels);
/// Tau used at resolution N on level k.
double eoc_tau(const ScenarioConfig& cfg, int level, int n);

}  // namespace chdg
