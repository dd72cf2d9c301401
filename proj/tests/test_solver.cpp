#include "chdg/linear_solver.hpp"
#include "chdg/newton.hpp"
#include "chdg/scenarios.hpp"
#include "chdg/stepper.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace chdg;
using chdg::test::random_field;
using chdg::test::random_field_with_means;
using chdg::test::unit_mesh;

namespace {

std::vector<LinearMethod> all_methods() {
  std::vector<LinearMethod> m{LinearMethod::Dense, LinearMethod::BiCGStab, LinearMethod::SparseLU, LinearMethod::Auto};
  if (have_umfpack()) m.push_back(LinearMethod::Umfpack);
  return m;
}

// SIPG Laplacian plus the mass matrix: symmetric positive definite.
BlockSparseMatrix spd_matrix(const DGSpace& s, const DGForms& forms) {
  auto a = forms.assemble_laplace(8.0);
  const auto n = static_cast<Eigen::Index>(s.dofs_per_cell());
  for (std::size_t k = 0; k < s.num_cells(); ++k) {
    a.block(k, k) += s.mesh().cell(k).measure * Eigen::MatrixXd::Identity(n, n);
  }
  return a;
}

}  // namespace

TEST_CASE("method names") {
  CHECK(parse_linear_method("dense") == LinearMethod::Dense);
  CHECK(parse_linear_method("bicgstab") == LinearMethod::BiCGStab);
  CHECK(to_string(parse_linear_method("sparselu")) == "sparselu");
  CHECK_THROWS_AS(parse_linear_method("cholmod"), std::invalid_argument);
}

TEST_CASE("identity is solved exactly") {
  auto mesh = unit_mesh(CellType::Quad, 3);
  BlockSparseMatrix a(*mesh, 2);
  for (std::size_t k = 0; k < mesh->num_cells(); ++k) a.block(k, k) = Eigen::Matrix2d::Identity();
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(18, -1.0, 2.0);
  for (auto m : all_methods()) {
    LinearSolver solver({m});
    CHECK((solver.solve(a, b) - b).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("backends agree on an spd system") {
  auto s = make_space(unit_mesh(CellType::Tri, 6), 2);
  DGForms forms(s);
  const auto a = spd_matrix(*s, forms);
  std::mt19937_64 gen(31);
  const Eigen::VectorXd b = random_field(s, gen, -1, 1).coefficients();
  const Eigen::MatrixXd dense = a.to_dense();
  const Eigen::VectorXd ref = dense.ldlt().solve(b);
  for (auto m : all_methods()) {
    LinearSolver solver({m});
    const Eigen::VectorXd x = solver.solve(a, b);
    CHECK((x - ref).norm() <= 1e-10 * ref.norm());
    CHECK(solver.last().rel_residual <= 1e-12);
    // Reuse with a new rhs.
    const Eigen::VectorXd y = solver.solve(a, 2.0 * b);
    CHECK((y - 2.0 * ref).norm() <= 1e-10 * ref.norm());
  }
}

TEST_CASE("singular systems are reported") {
  auto mesh = unit_mesh(CellType::Quad, 2);
  BlockSparseMatrix a(*mesh, 1);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(4);
  LinearSolver dense({LinearMethod::Dense});
  CHECK_THROWS_AS(dense.solve(a, b), LinearSolveError);
  LinearSolver lu({LinearMethod::SparseLU});
  CHECK_THROWS_AS(lu.solve(a, b), LinearSolveError);
  CHECK_THROWS_AS(dense.solve(a, Eigen::VectorXd::Ones(3)), std::invalid_argument);
}

TEST_CASE("newton converges quadratically") {
  auto mesh = unit_mesh(CellType::Quad, 2);
  const ResidualFn f = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd r = x.array().square() - 2.0;
    return r;
  };
  const JacobianFn j = [&](const Eigen::VectorXd& x) {
    BlockSparseMatrix a(*mesh, 1);
    for (std::size_t k = 0; k < 4; ++k) a.block(k, k)(0, 0) = 2.0 * x[static_cast<Eigen::Index>(k)];
    return a;
  };
  Eigen::VectorXd x = Eigen::VectorXd::Constant(4, 1.0);
  NewtonConfig cfg;
  cfg.tol = 1e-14;
  LinearSolver solver;
  const auto rep = newton_solve(f, j, x, cfg, solver);
  CHECK(rep.iterations <= 6);
  CHECK((x.array() - std::sqrt(2.0)).abs().maxCoeff() < 1e-15);
  REQUIRE(rep.history.size() >= 4);
  // Quadratic: e_{k+1} ~ e_k^2 / (2 sqrt 2).
  CHECK(rep.history[3] < 10.0 * rep.history[2] * rep.history[2]);

  Eigen::VectorXd y = Eigen::VectorXd::Constant(4, std::sqrt(2.0));
  const auto zero = newton_solve(f, j, y, cfg, solver);
  CHECK(zero.iterations == 0);
}

TEST_CASE("newton hooks") {
  auto mesh = unit_mesh(CellType::Quad, 2);
  const ResidualFn f = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd r = x.array().square() - 2.0;
    return r;
  };
  const JacobianFn j = [&](const Eigen::VectorXd& x) {
    BlockSparseMatrix a(*mesh, 1);
    for (std::size_t k = 0; k < 4; ++k) a.block(k, k)(0, 0) = 2.0 * x[static_cast<Eigen::Index>(k)];
    return a;
  };
  LinearSolver solver;
  NewtonConfig cfg;
  cfg.tol = 1e-13;

  Eigen::VectorXd x = Eigen::VectorXd::Constant(4, -1.0);
  newton_solve(f, j, x, cfg, solver);
  CHECK((x.array() + std::sqrt(2.0)).abs().maxCoeff() < 1e-14);

  // Folding every trial onto x >= 0 picks the other root.
  int projected = 0;
  cfg.project = [&](Eigen::VectorXd& y) {
    y = y.cwiseAbs();
    ++projected;
  };
  x.setConstant(-1.0);
  const auto rep = newton_solve(f, j, x, cfg, solver);
  CHECK(projected >= rep.iterations);
  CHECK((x.array() - std::sqrt(2.0)).abs().maxCoeff() < 1e-14);

  // Pin x[0] through the linear system; it must not move.
  cfg.project = nullptr;
  int constrained = 0;
  cfg.constrain = [&](const Eigen::VectorXd& y, BlockSparseMatrix& jac, Eigen::VectorXd& rhs) {
    CHECK(jac.block(0, 0)(0, 0) == 2.0 * y[0]);
    jac.block(0, 0)(0, 0) = 1.0;
    rhs[0] = 0.0;
    ++constrained;
  };
  const ResidualFn g = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd r = f(y);
    r[0] = y[0] * y[0] - 1.0;
    return r;
  };
  x.setConstant(1.0);
  const auto pinned = newton_solve(g, j, x, cfg, solver);
  CHECK(constrained == pinned.iterations);
  CHECK(x[0] == 1.0);
  CHECK((x.tail(3).array() - std::sqrt(2.0)).abs().maxCoeff() < 1e-14);
}

TEST_CASE("newton failure carries the history") {
  auto mesh = unit_mesh(CellType::Quad, 2);
  const ResidualFn f = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd r = x.array().square() + 1.0;
    return r;
  };
  const JacobianFn j = [&](const Eigen::VectorXd& x) {
    BlockSparseMatrix a(*mesh, 1);
    for (std::size_t k = 0; k < 4; ++k) a.block(k, k)(0, 0) = 2.0 * x[static_cast<Eigen::Index>(k)] + 0.1;
    return a;
  };
  Eigen::VectorXd x = Eigen::VectorXd::Constant(4, 0.5);
  NewtonConfig cfg;
  cfg.max_iters = 5;
  LinearSolver solver;
  try {
    newton_solve(f, j, x, cfg, solver);
    FAIL("expected NewtonError");
  } catch (const NewtonError& e) {
    CHECK(e.report().iterations <= 5);
    CHECK(e.residual_norm() >= 2.0);
    CHECK(!e.report().history.empty());
  }
}

namespace {

SchemeParams small_params() {
  SchemeParams p;
  p.pe = 1.0;
  p.cn = 0.05;
  p.tau = 1e-4;
  p.eta = 8.0;
  p.eta_laplace = 8.0;
  return p;
}

}  // namespace

TEST_CASE("steady state needs no newton iteration") {
  auto s = make_space(unit_mesh(CellType::Tri, 4), 1);
  auto scheme = std::make_shared<const SwipdpScheme>(s, small_params());
  DiscreteField phi(s), mu(s);
  for (std::size_t k = 0; k < s->num_cells(); ++k) {
    phi(k, 0) = 0.3;
    mu(k, 0) = potential_terms(0.3).dw;
  }
  CoupledState state(phi, mu);
  StepperConfig cfg;
  cfg.newton.tol = 1e-13;
  Stepper stepper(scheme, cfg);
  const auto info = stepper.advance(state);
  CHECK(info.newton.iterations == 0);
  CHECK(state.step == 1);
  CHECK(state.time == doctest::Approx(1e-4));
  CHECK((state.phi.coefficients() - phi.coefficients()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("one limited step keeps mass and bounds") {
  std::mt19937_64 gen(32);
  for (CellType t : {CellType::Quad, CellType::Tri}) {
    auto s = make_space(unit_mesh(t, 6), 1);
    auto scheme = std::make_shared<const SwipdpScheme>(s, small_params());
    StepperConfig cfg;
    cfg.newton.tol = 1e-13;
    cfg.limiter_enabled = true;
    Stepper stepper(scheme, cfg);
    auto phi = random_field_with_means(s, gen, -0.95, 0.95, 0.02);
    CoupledState state(limit_field(phi, cfg.limiter), DiscreteField(s));
    const double m0 = mass(state.phi);
    const auto info = stepper.advance(state);
    CHECK(info.newton.residual_norm <= 1e-13);
    CHECK(std::abs(mass(state.phi) - m0) <= 1e-13);
    const auto [lo, hi] = sample_extrema(state.phi, make_sample_set(s->basis(), SampleMode::Quadrature));
    CHECK(lo >= -1.0 - 1e-13);
    CHECK(hi <= 1.0 + 1e-13);
  }
}

TEST_CASE("limiter does nothing for p = 0") {
  std::mt19937_64 gen(33);
  auto s = make_space(unit_mesh(CellType::Quad, 5), 0);
  auto scheme = std::make_shared<const SwipdpScheme>(s, small_params());
  StepperConfig off, on;
  off.newton.tol = on.newton.tol = 1e-13;
  on.limiter_enabled = true;
  Stepper a(scheme, off), b(scheme, on);
  const auto phi = random_field(s, gen, -0.9, 0.9);
  CoupledState x(phi, DiscreteField(s)), y(phi, DiscreteField(s));
  a.advance(x);
  b.advance(y);
  CHECK(x.phi.coefficients() == y.phi.coefficients());
}

TEST_CASE("step counts") {
  CHECK(number_of_steps(1e-3, 1e-3) == 1);
  CHECK(number_of_steps(0.05, 1e-4) == 500);
  CHECK(number_of_steps(0.04, 5e-5) == 800);
  CHECK(number_of_steps(1e-4, 3e-5) == 4);
}

TEST_CASE("a run with T = tau takes exactly one step") {
  auto cfg = default_config(Scenario::Spinodal);
  cfg.n = 4;
  cfg.t_end = cfg.tau;
  cfg.snapshots.clear();
  const auto sim = make_simulation(cfg);
  const auto res = run_simulation(sim);
  REQUIRE(!res.failed);
  CHECK(res.rows.size() == 2);
  CHECK(res.rows.back().step == 1);
  CHECK(res.rows.back().time == doctest::Approx(cfg.tau));
}

TEST_CASE("runs are deterministic") {
  auto cfg = default_config(Scenario::Spinodal);
  cfg.n = 6;
  cfg.t_end = 3 * cfg.tau;
  cfg.snapshots.clear();
  const auto a = run_simulation(make_simulation(cfg));
  const auto b = run_simulation(make_simulation(cfg));
  REQUIRE(a.final_state);
  REQUIRE(b.final_state);
  CHECK(a.final_state->phi.coefficients() == b.final_state->phi.coefficients());
  cfg.seed = 43;
  const auto c = run_simulation(make_simulation(cfg));
  CHECK(c.final_state->phi.coefficients() != a.final_state->phi.coefficients());
}
