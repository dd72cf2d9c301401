#include "chdg/config.hpp"
#include "chdg/output.hpp"
#include "chdg/scenarios.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace chdg;

TEST_CASE("config parsing") {
  std::istringstream in(
      "# comment\n"
      "scenario = spinodal   # trailing\n"
      "\n"
      "n=16\n"
      "tau = 2.5e-4\n"
      "limiter = off\n"
      "snapshots = 0.1, 0.2 ,0.3\n");
  auto c = Config::parse(in, "test");
  CHECK(c.get_string("scenario", "") == "spinodal");
  CHECK(c.get_int("n", 0) == 16);
  CHECK(c.get_double("tau", 0.0) == 2.5e-4);
  CHECK(c.get_bool("limiter", true) == false);
  CHECK(c.get_doubles("snapshots", {}) == std::vector<double>{0.1, 0.2, 0.3});
  CHECK(c.get_double("missing", 7.0) == 7.0);
  CHECK(c.unused_keys().empty());

  c.apply_override("n = 8");
  CHECK(c.get_int("n", 0) == 8);
  CHECK_THROWS_AS(c.apply_override("novalue"), std::invalid_argument);
  CHECK_THROWS_AS(c.apply_override("=3"), std::invalid_argument);

  c.set("tau", "abc");
  CHECK_THROWS_AS(c.get_double("tau", 0.0), std::invalid_argument);
  c.set("n", "2.5");
  CHECK_THROWS_AS(c.get_int("n", 0), std::invalid_argument);
  c.set("limiter", "maybe");
  CHECK_THROWS_AS(c.get_bool("limiter", false), std::invalid_argument);

  std::istringstream bad("just words\n");
  CHECK_THROWS_AS(Config::parse(bad), std::invalid_argument);
  CHECK_THROWS_AS(Config::load("/nonexistent/file.cfg"), std::runtime_error);
}

TEST_CASE("scenario config from a file") {
  std::istringstream in("scenario = merging\nn = 16\nlinear_solver = sparselu\nseed = 18446744073709551615\nsamples = boundary\n");
  const auto sc = scenario_from_config(Config::parse(in));
  CHECK(sc.scenario == Scenario::Merging);
  CHECK(sc.n == 16);
  CHECK(sc.linear == LinearMethod::SparseLU);
  CHECK(sc.seed == 18446744073709551615ull);
  CHECK(sc.samples == SampleMode::Boundary);
  // Unset keys keep the scenario defaults.
  CHECK(sc.cn == doctest::Approx(1.0 / 64.0));
  CHECK(sc.tau == doctest::Approx(5e-5));

  std::istringstream typo("scenario = spinodal\ntua = 1e-3\n");
  CHECK_THROWS_AS(scenario_from_config(Config::parse(typo)), std::invalid_argument);
  std::istringstream mesh("scenario = spinodal\nmesh = hex\n");
  CHECK_THROWS_AS(scenario_from_config(Config::parse(mesh)), std::invalid_argument);
  std::istringstream neg("scenario = spinodal\ntau = -1\n");
  CHECK_THROWS_AS(scenario_from_config(Config::parse(neg)), std::invalid_argument);
  CHECK_THROWS_AS(parse_scenario("droplet"), std::invalid_argument);
  std::istringstream seed("scenario = spinodal\nseed = 1e3\n");
  CHECK_THROWS_AS(scenario_from_config(Config::parse(seed)), std::invalid_argument);
}

TEST_CASE("scenario defaults") {
  const auto trig = default_config(Scenario::TrigEoc);
  CHECK(trig.mesh == CellType::Quad);
  CHECK(trig.pe == doctest::Approx(0.3));
  CHECK(trig.cn == doctest::Approx(0.1));
  CHECK(trig.t_end == doctest::Approx(1e-4));
  const auto sp = default_config(Scenario::Spinodal);
  CHECK(sp.mesh == CellType::Tri);
  CHECK(sp.p == 1);
  CHECK(sp.cn == doctest::Approx(0.01));
  CHECK(sp.t_end == doctest::Approx(0.05));
  CHECK(sp.limiter);
  const auto mg = default_config(Scenario::Merging);
  CHECK(mg.n == 64);
  CHECK(mg.t_end == doctest::Approx(0.04));
  for (auto s : {Scenario::TrigEoc, Scenario::Spinodal, Scenario::Merging}) {
    CHECK(parse_scenario(to_string(s)) == s);
    CHECK_NOTHROW(default_config(s).validate());
  }
}

TEST_CASE("initial states") {
  auto sp = default_config(Scenario::Spinodal);
  sp.n = 8;
  const auto sim = make_simulation(sp);
  const auto st = initial_state(sim);
  for (std::size_t k = 0; k < sim.space->num_cells(); ++k) {
    CHECK(st.phi(k, 0) >= 0.29);
    CHECK(st.phi(k, 0) <= 0.31);
    for (std::size_t j = 1; j < sim.space->dofs_per_cell(); ++j) CHECK(st.phi(k, j) == 0.0);
  }
  CHECK(st.mu.coefficients().isZero(0.0));

  auto mg = default_config(Scenario::Merging);
  mg.n = 16;
  const auto msim = make_simulation(mg);
  const auto [lo, hi] = sample_extrema(initial_state(msim).phi, msim.samples);
  CHECK(hi <= 1.0 + 1e-14);
  CHECK(lo >= -1.0 - 1e-14);
}

namespace {

DiagnosticsRow sample_row(int step) {
  DiagnosticsRow r;
  r.step = step;
  r.time = 0.1 * step + 1.0 / 3.0;
  r.energy = std::exp(-step) * 12.345678901234567;
  r.mass = 0.3 + 1e-17 * step;
  r.min_sample = -0.999999999999;
  r.max_sample = 1.0000000000000004;
  r.min_avg = -0.5;
  r.max_avg = 0.75;
  r.newton_iters = step % 4;
  r.residual = 3.1e-15;
  r.violation = 4.4e-16;
  return r;
}

bool same_row(const DiagnosticsRow& a, const DiagnosticsRow& b) {
  return a.step == b.step && a.time == b.time && a.energy == b.energy && a.mass == b.mass &&
         a.min_sample == b.min_sample && a.max_sample == b.max_sample && a.min_avg == b.min_avg &&
         a.max_avg == b.max_avg && a.newton_iters == b.newton_iters && a.residual == b.residual &&
         a.violation == b.violation;
}

}  // namespace

TEST_CASE("csv round trip is exact") {
  std::vector<DiagnosticsRow> rows;
  for (int i = 0; i < 5; ++i) rows.push_back(sample_row(i));
  std::stringstream ss;
  write_csv(rows, ss);
  const auto back = read_csv(ss);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(same_row(rows[i], back[i]));

  std::stringstream empty;
  write_csv({}, empty);
  CHECK(empty.str() == std::string(kCsvHeader) + "\n");
  CHECK(read_csv(empty).empty());

  std::stringstream wrong("a,b,c\n1,2,3\n");
  CHECK_THROWS(read_csv(wrong));

  const auto path = std::filesystem::temp_directory_path() / "chdg_test_rows.csv";
  write_csv(rows, path.string());
  const auto disk = read_csv(path.string());
  CHECK(disk.size() == rows.size());
  std::filesystem::remove(path);
  CHECK_THROWS(write_csv(rows, "/nonexistent/dir/x.csv"));
}

TEST_CASE("vtk output for a single cell") {
  auto mesh = std::make_shared<const MeshTopology>(build_quad_mesh(1, 1));
  auto s = make_space(mesh, 1);
  DiscreteField phi = project_l2([](const Vec2& x) { return x.x(); }, s);
  CoupledState st(phi, DiscreteField(s));
  std::stringstream ss;
  write_vtk(st, ss);
  const std::string out = ss.str();
  CHECK(out.rfind("# vtk DataFile Version 3.0", 0) == 0);
  CHECK(out.find("POINTS 4 double") != std::string::npos);
  CHECK(out.find("CELLS 1 5") != std::string::npos);
  CHECK(out.find("CELL_TYPES 1\n9\n") != std::string::npos);
  CHECK(out.find("SCALARS phi_avg") != std::string::npos);
  CHECK(out.find("POINT_DATA 4") != std::string::npos);

  // The point values of phi are the corner x-coordinates.
  std::istringstream in(out.substr(out.find("SCALARS phi double")));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  double v[4];
  for (double& x : v) in >> x;
  CHECK(v[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(1.0));
  CHECK(v[2] == doctest::Approx(1.0));
  CHECK(std::abs(v[3]) < 1e-12);

  auto tri = make_space(std::make_shared<const MeshTopology>(build_tri_mesh(1, 1)), 0);
  std::stringstream ts;
  write_vtk(CoupledState(DiscreteField(tri), DiscreteField(tri)), ts);
  CHECK(ts.str().find("CELL_TYPES 2\n5\n5\n") != std::string::npos);
  CHECK(ts.str().find("POINT_DATA") == std::string::npos);
}

TEST_CASE("eoc table formatting") {
  EocTable t;
  t.p = 1;
  t.amplitude = 0.5;
  t.limiter = true;
  EocRow a{10, 1e-5, 10, 4e-3, std::numeric_limits<double>::quiet_NaN(), 0.8,
           std::numeric_limits<double>::quiet_NaN(), false, ""};
  EocRow b{20, 5e-6, 20, 1e-3, 2.0, 0.4, 1.0, false, ""};
  EocRow c{40, 2.5e-6, 40, 0, 0, 0, 0, true, "no convergence"};
  t.rows = {a, b, c};
  const auto s = format_eoc(t);
  CHECK(s.find("limiter = on") != std::string::npos);
  CHECK(s.find("2.000") != std::string::npos);
  CHECK(s.find("FAILED: no convergence") != std::string::npos);
}

TEST_CASE("eoc columns follow from the errors") {
  auto cfg = default_config(Scenario::TrigEoc);
  cfg.n = 4;
  cfg.t_end = 2e-4;
  cfg.tau = 1e-4;
  const auto table = run_trig_eoc(cfg, 3);
  REQUIRE(table.rows.size() == 3);
  CHECK(std::isnan(table.rows[0].l2_eoc));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    REQUIRE(!r.failed);
    CHECK(r.n == 4 << i);
    CHECK(r.steps * r.tau == doctest::Approx(cfg.t_end));
    if (i > 0) {
      const auto& q = table.rows[i - 1];
      CHECK(r.l2_eoc == doctest::Approx(std::log2(q.l2 / r.l2)));
      CHECK(r.h1_eoc == doctest::Approx(std::log2(q.h1 / r.h1)));
      CHECK(r.tau <= q.tau);
    }
  }
  CHECK(eoc_tau(cfg, 1, 8) == doctest::Approx(table.rows[1].tau));
}
