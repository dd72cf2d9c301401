// Command-line driver: run a scenario, run the EOC study, or run the
// property probes.

#include "chdg/output.hpp"
#include "chdg/random.hpp"
#include "chdg/scenarios.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace chdg;

namespace {

constexpr int kExitSolver = 2;
constexpr int kExitCheck = 3;

ScenarioConfig load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
  Config cfg = Config::load(path);
  for (const auto& o : overrides) cfg.apply_override(o);
  ScenarioConfig sc = scenario_from_config(cfg);
  if (const char* env = std::getenv("CHDG_OUTPUT_DIR"); env && *env) sc.output_dir = env;
  return sc;
}

std::string snapshot_name(const fs::path& dir, int index, double time) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_%02d_t%.6f.vtk", index, time);
  return (dir / buf).string();
}

int cmd_run(const std::string& path, const std::vector<std::string>& overrides, int max_steps) {
  const ScenarioConfig sc = load_scenario(path, overrides);
  const fs::path dir = sc.output_dir;
  fs::create_directories(dir);
  const Simulation sim = make_simulation(sc);
  std::printf("%s: %s mesh %dx%d, p=%d, %zu unknowns, eta=%g, limiter %s\n", to_string(sc.scenario).c_str(),
              sc.mesh == CellType::Quad ? "quad" : "tri", sc.n, sc.n, sc.p, sim.scheme->num_unknowns(),
              sim.params.eta, sc.limiter ? "on" : "off");
  int snap = 0;
  RunObserver obs;
  obs.on_row = [](const DiagnosticsRow& r) {
    if (r.step % 50 == 0) {
      std::printf("  step %5d t=%.5f E=%.10e mass=%.15f range=[%.15f, %.15f] newton=%d\n", r.step, r.time, r.energy,
                  r.mass, r.min_sample, r.max_sample, r.newton_iters);
      std::fflush(stdout);
    }
  };
  obs.on_snapshot = [&](const CoupledState& s) { write_vtk(s, snapshot_name(dir, snap++, s.time)); };
  const RunResult res = run_simulation(sim, obs, max_steps);
  const std::string csv = (dir / (to_string(sc.scenario) + ".csv")).string();
  write_csv(res.rows, csv);
  std::printf("wrote %s (%zu rows)\n", csv.c_str(), res.rows.size());
  if (res.failed) {
    std::fprintf(stderr, "solver failure: %s\n", res.error.c_str());
    return kExitSolver;
  }
  return 0;
}

int cmd_eoc(const std::string& path, const std::vector<std::string>& overrides, int levels) {
  ScenarioConfig sc = load_scenario(path, overrides);
  if (levels > 0) sc.levels = levels;
  if (sc.scenario != Scenario::TrigEoc) throw std::invalid_argument("eoc needs scenario = trig_eoc");
  const EocTable table = run_trig_eoc(sc, sc.levels);
  const std::string text = format_eoc(table);
  std::cout << text;
  fs::create_directories(sc.output_dir);
  write_eoc(table, (fs::path(sc.output_dir) / "eoc.txt").string());
  for (const auto& r : table.rows) {
    if (r.failed) return kExitSolver;
  }
  return 0;
}

int cmd_check(int trials, std::uint64_t seed) {
  bool ok = true;
  auto line = [&](bool pass, const std::string& what) {
    std::printf("%s  %s\n", pass ? "PASS" : "FAIL", what.c_str());
    ok = ok && pass;
  };
  const Rectangle unit{0.0, 1.0, 0.0, 1.0};
  for (CellType type : {CellType::Tri, CellType::Quad}) {
    auto mesh = std::make_shared<const MeshTopology>(type == CellType::Quad ? build_quad_mesh(8, 8, unit)
                                                                            : build_tri_mesh(8, 8, unit));
    for (int p : {0, 1, 2}) {
      DGForms forms(make_space(mesh, p));
      const double eta = auto_penalty(*mesh, p, 1.0);
      const auto rep = coercivity_probe(forms, eta, trials, seed);
      char buf[200];
      std::snprintf(buf, sizeof buf, "coercivity %s p=%d eta=%g: worst margin %.3e, min b/|v|^2 %.3e",
                    type == CellType::Quad ? "quad" : "tri", p, eta, rep.worst_margin, rep.worst_semipositivity);
      line(rep.worst_semipositivity >= -1e-12, buf);
    }
  }

  auto mesh = std::make_shared<const MeshTopology>(build_tri_mesh(4, 4, unit));
  const auto space = make_space(mesh, 2);
  const LimiterConfig lcfg;
  const SampleSet samples = make_sample_set(space->basis(), lcfg.samples);
  Rng rng(seed);
  double worst = 0.0;
  bool averages = true;
  for (int t = 0; t < trials; ++t) {
    DiscreteField f(space);
    for (std::size_t k = 0; k < space->num_cells(); ++k) {
      f(k, 0) = rng.uniform(-1.0, 1.0);
      for (std::size_t j = 1; j < space->dofs_per_cell(); ++j) f(k, j) = rng.uniform(-2.0, 2.0);
    }
    const DiscreteField g = limit_field(f, lcfg);
    worst = std::max(worst, bound_report(g, samples).violation);
    for (std::size_t k = 0; k < space->num_cells(); ++k) averages = averages && g(k, 0) == f(k, 0);
  }
  line(averages, "limiter preserves cell averages");
  char buf[120];
  std::snprintf(buf, sizeof buf, "limiter bound violation %.3e <= 1e-13", worst);
  line(worst <= 1e-13, buf);
  return ok ? 0 : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cahn-Hilliard DG solver with degenerate mobility"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> params;
  int max_steps = 0;
  auto* run = app.add_subcommand("run", "run a scenario from a config file");
  run->add_option("config", config, "key = value config file")->required()->check(CLI::ExistingFile);
  run->add_option("--param", params, "override, key=value");
  run->add_option("--max-steps", max_steps, "stop after this many steps");

  int levels = 0;
  auto* eoc = app.add_subcommand("eoc", "convergence study for the trig_eoc scenario");
  eoc->add_option("config", config, "key = value config file")->required()->check(CLI::ExistingFile);
  eoc->add_option("--param", params, "override, key=value");
  eoc->add_option("--levels", levels, "number of refinement levels");

  int trials = 100;
  std::uint64_t seed = 7;
  auto* check = app.add_subcommand("check", "coercivity and limiter probes");
  check->add_option("--trials", trials, "random trials per probe");
  check->add_option("--seed", seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(config, params, max_steps);
    if (eoc->parsed()) return cmd_eoc(config, params, levels);
    return cmd_check(trials, seed);
  } catch (const NewtonError& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kExitSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
