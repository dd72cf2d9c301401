#include "chdg/scenarios.hpp"

#include "chdg/manufactured.hpp"
#include "chdg/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace chdg {

Scenario parse_scenario(const std::string& name) {
  if (name == "trig_eoc") return Scenario::TrigEoc;
  if (name == "spinodal") return Scenario::Spinodal;
  if (name == "merging") return Scenario::Merging;
  throw std::invalid_argument("unknown scenario '" + name + "' (trig_eoc, spinodal, merging)");
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::TrigEoc: return "trig_eoc";
    case Scenario::Spinodal: return "spinodal";
    case Scenario::Merging: return "merging";
  }
  return "?";
}

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("scenario config: ") + what);
  };
  require(n >= 1, "n must be >= 1");
  require(p >= 0 && p <= 6, "p must be in [0, 6]");
  require(pe > 0.0 && cn > 0.0, "Pe and Cn must be positive");
  require(tau > 0.0 && t_end > 0.0, "tau and T must be positive");
  require(eta > 0.0, "eta must be positive");
  require(newton_tol > 0.0 && newton_max_iters >= 1, "bad Newton settings");
  require(amplitude > 0.0 && amplitude <= 1.0, "amplitude must be in (0, 1]");
  require(a2 >= 0.0 && a2 < 1.0, "a2 must be in [0, 1)");
  require(levels >= 1, "levels must be >= 1");
}

ScenarioConfig default_config(Scenario s) {
  ScenarioConfig c;
  c.scenario = s;
  switch (s) {
    case Scenario::TrigEoc:
      c.mesh = CellType::Quad;
      c.n = 40;
      c.p = 0;
      c.pe = 0.3;
      c.cn = 0.1;
      c.tau = 1e-3;
      c.t_end = 1e-4;
      c.eta = 1.0;  // replaced by max{1, 3p(p+1)} below unless set
      c.limiter = false;
      c.newton_tol = 1e-12;
      c.amplitude = 0.1;
      break;
    case Scenario::Spinodal:
      c.n = 32;
      c.t_end = 0.05;
      c.snapshots = {0.025, 0.0375, 0.05};
      break;
    case Scenario::Merging:
      c.n = 64;
      c.cn = 1.0 / 64.0;
      c.tau = 5e-5;
      c.t_end = 0.04;
      c.snapshots = {0.02, 0.03, 0.04};
      break;
  }
  return c;
}

ScenarioConfig scenario_from_config(const Config& cfg) {
  ScenarioConfig c = default_config(parse_scenario(cfg.get_string("scenario", "spinodal")));
  const std::string mesh = cfg.get_string("mesh", c.mesh == CellType::Quad ? "quad" : "tri");
  if (mesh == "quad") {
    c.mesh = CellType::Quad;
  } else if (mesh == "tri") {
    c.mesh = CellType::Tri;
  } else {
    throw std::invalid_argument("config: mesh must be quad or tri");
  }
  c.n = cfg.get_int("n", c.n);
  c.p = cfg.get_int("p", c.p);
  if (c.scenario == Scenario::TrigEoc) c.eta = std::max(1.0, 3.0 * c.p * (c.p + 1));
  c.pe = cfg.get_double("pe", c.pe);
  c.cn = cfg.get_double("cn", c.cn);
  c.tau = cfg.get_double("tau", c.tau);
  c.t_end = cfg.get_double("t_end", c.t_end);
  const std::string eta = cfg.get_string("eta", "");
  if (eta == "auto") {
    c.eta_auto = true;
  } else if (!eta.empty()) {
    c.eta = cfg.get_double("eta", c.eta);
  }
  c.eta = cfg.get_double("eta_floor", c.eta);
  c.limiter = cfg.get_bool("limiter", c.limiter);
  const std::string samples = cfg.get_string("samples", "quadrature");
  if (samples == "quadrature") {
    c.samples = SampleMode::Quadrature;
  } else if (samples == "boundary") {
    c.samples = SampleMode::Boundary;
  } else {
    throw std::invalid_argument("config: samples must be quadrature or boundary");
  }
  c.newton_tol = cfg.get_double("newton_tol", c.newton_tol);
  c.newton_max_iters = cfg.get_int("newton_max_iters", c.newton_max_iters);
  c.linear = parse_linear_method(cfg.get_string("linear_solver", to_string(c.linear)));
  const std::string seed = cfg.get_string("seed", std::to_string(c.seed));
  try {
    std::size_t used = 0;
    c.seed = std::stoull(seed, &used);
    if (used != seed.size()) throw std::invalid_argument(seed);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: seed must be a non-negative integer, got '" + seed + "'");
  }
  c.amplitude = cfg.get_double("amplitude", c.amplitude);
  c.a2 = cfg.get_double("a2", c.a2);
  c.snapshots = cfg.get_doubles("snapshots", c.snapshots);
  c.output_dir = cfg.get_string("output_dir", c.output_dir);
  c.levels = cfg.get_int("levels", c.levels);
  c.caption_tau = cfg.get_bool("caption_tau", c.caption_tau);
  const auto unused = cfg.unused_keys();
  if (!unused.empty()) throw std::invalid_argument("config: unknown key '" + unused.front() + "'");
  c.validate();
  return c;
}

namespace {

double merging_profile(const Vec2& x, double cn, double a2) {
  constexpr double r = 0.2;
  const Vec2 centres[2] = {Vec2(0.3, 0.5), Vec2(0.7, 0.5)};
  double s = 1.0;
  for (const auto& c : centres) s += 0.5 * std::tanh((r - (x - c).norm()) / (std::sqrt(2.0) * cn));
  return (1.0 - a2) * (2.0 * std::min(s, 1.0) - 1.0);
}

}  // namespace

Simulation make_simulation(const ScenarioConfig& cfg) {
  cfg.validate();
  Simulation sim;
  sim.config = cfg;
  const Rectangle unit{0.0, 1.0, 0.0, 1.0};
  sim.mesh = std::make_shared<const MeshTopology>(cfg.mesh == CellType::Quad ? build_quad_mesh(cfg.n, cfg.n, unit)
                                                                             : build_tri_mesh(cfg.n, cfg.n, unit));
  sim.space = make_space(sim.mesh, cfg.p);
  sim.params.pe = cfg.pe;
  sim.params.cn = cfg.cn;
  sim.params.tau = cfg.tau;
  sim.params.eta = cfg.eta_auto ? auto_penalty(*sim.mesh, cfg.p, cfg.eta) : cfg.eta;
  sim.params.eta_laplace = sim.params.eta;
  std::optional<ScalarFunction> source;
  if (cfg.scenario == Scenario::TrigEoc) {
    sim.params.source_enabled = true;
    source = TrigSolution{cfg.amplitude, cfg.cn, cfg.pe}.source_fn();
  }
  sim.scheme = std::make_shared<const SwipdpScheme>(sim.space, sim.params, source);
  sim.stepper.newton.tol = cfg.newton_tol;
  sim.stepper.newton.max_iters = cfg.newton_max_iters;
  sim.stepper.newton.linear.method = cfg.linear;
  sim.stepper.limiter_enabled = cfg.limiter;
  sim.stepper.limiter.samples = cfg.samples;
  sim.samples = make_sample_set(sim.space->basis(), cfg.samples);
  return sim;
}

CoupledState initial_state(const Simulation& sim) {
  const auto& cfg = sim.config;
  DiscreteField phi(sim.space);
  switch (cfg.scenario) {
    case Scenario::TrigEoc:
      phi = project_l2(TrigSolution{cfg.amplitude, cfg.cn, cfg.pe}.value_fn(), sim.space);
      break;
    case Scenario::Spinodal: {
      Rng rng(cfg.seed);
      for (std::size_t k = 0; k < sim.space->num_cells(); ++k) phi(k, 0) = 0.3 + rng.uniform(-0.01, 0.01);
      break;
    }
    case Scenario::Merging:
      phi = project_l2([&](const Vec2& x) { return merging_profile(x, cfg.cn, cfg.a2); }, sim.space);
      break;
  }
  CoupledState state(std::move(phi), DiscreteField(sim.space));
  if (cfg.limiter && cfg.p > 0) state.phi = limit_field(state.phi, sim.stepper.limiter);
  return state;
}

int number_of_steps(double t_end, double tau) {
  const double r = t_end / tau;
  // Ratios within round-off of an integer are not rounded up.
  const double nearest = std::round(r);
  if (std::abs(r - nearest) <= 1e-9 * std::max(1.0, r)) return std::max(1, static_cast<int>(nearest));
  return std::max(1, static_cast<int>(std::ceil(r)));
}

RunResult run_simulation(const Simulation& sim, const RunObserver& observer, int max_steps) {
  RunResult result;
  CoupledState state = initial_state(sim);
  Stepper stepper(sim.scheme, sim.stepper);
  const auto& forms = sim.scheme->forms();

  auto record = [&](const NewtonReport& rep) {
    result.rows.push_back(make_row(state, forms, sim.params, sim.samples, rep));
    if (observer.on_row) observer.on_row(result.rows.back());
  };
  record(NewtonReport{});
  if (observer.on_snapshot) observer.on_snapshot(state);

  int steps = number_of_steps(sim.config.t_end, sim.params.tau);
  if (max_steps > 0) steps = std::min(steps, max_steps);
  std::vector<double> pending = sim.config.snapshots;
  std::sort(pending.begin(), pending.end());
  std::size_t next = 0;
  for (int n = 0; n < steps; ++n) {
    try {
      const StepInfo info = stepper.advance(state);
      record(info.newton);
    } catch (const NewtonError& e) {
      result.failed = true;
      result.error = "step " + std::to_string(n + 1) + ": " + e.what();
      break;
    }
    while (next < pending.size() && state.time >= pending[next] - 0.5 * sim.params.tau) {
      if (observer.on_snapshot) observer.on_snapshot(state);
      ++next;
    }
  }
  result.final_state = std::move(state);
  return result;
}

double eoc_tau(const ScenarioConfig& cfg, int level, int n) {
  if (cfg.caption_tau) return cfg.t_end * std::pow(2.0, -(n - 20) / 20.0);
  return std::min(cfg.tau * std::ldexp(1.0, -level), cfg.t_end);
}

EocTable run_trig_eoc(const ScenarioConfig& base, int levels) {
  if (levels < 1) throw std::invalid_argument("run_trig_eoc: levels must be >= 1");
  EocTable table;
  table.p = base.p;
  table.amplitude = base.amplitude;
  table.limiter = base.limiter;
  for (int k = 0; k < levels; ++k) {
    ScenarioConfig cfg = base;
    cfg.scenario = Scenario::TrigEoc;
    cfg.n = base.n << k;
    const double tau = eoc_tau(base, k, cfg.n);
    EocRow row;
    row.n = cfg.n;
    row.steps = number_of_steps(cfg.t_end, tau);
    // Uniform steps landing exactly on T.
    row.tau = cfg.t_end / row.steps;
    cfg.tau = row.tau;
    cfg.snapshots.clear();
    const Simulation sim = make_simulation(cfg);
    CoupledState state = initial_state(sim);
    Stepper stepper(sim.scheme, sim.stepper);
    try {
      for (int s = 0; s < row.steps; ++s) stepper.advance(state);
      const TrigSolution exact{cfg.amplitude, cfg.cn, cfg.pe};
      std::tie(row.l2, row.h1) = l2_h1_errors(state.phi, exact.value_fn(), exact.gradient_fn());
    } catch (const NewtonError& e) {
      row.failed = true;
      row.error = e.what();
      row.l2 = row.h1 = std::numeric_limits<double>::quiet_NaN();
    }
    row.l2_eoc = row.h1_eoc = std::numeric_limits<double>::quiet_NaN();
    if (!table.rows.empty()) {
      const auto& prev = table.rows.back();
      row.l2_eoc = std::log2(prev.l2 / row.l2);
      row.h1_eoc = std::log2(prev.h1 / row.h1);
    }
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace chdg
