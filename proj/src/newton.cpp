#include "chdg/newton.hpp"

#include <cmath>
#include <cstdio>

namespace chdg {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

NewtonReport newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, Eigen::VectorXd& x,
                          const NewtonConfig& cfg, LinearSolver& linear) {
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("newton_solve: tol must be positive");
  NewtonReport rep;
  Eigen::VectorXd r = residual(x);
  double norm = r.norm();
  rep.history.push_back(norm);
  while (norm > cfg.tol) {
    if (!std::isfinite(norm)) {
      rep.residual_norm = norm;
      throw NewtonError("Newton: non-finite residual at iteration " + std::to_string(rep.iterations), rep);
    }
    if (rep.iterations >= cfg.max_iters) {
      rep.residual_norm = norm;
      throw NewtonError("Newton: no convergence in " + std::to_string(cfg.max_iters) +
                            " iterations, residual " + sci(norm) + " > tol " + sci(cfg.tol),
                        rep);
    }
    Eigen::VectorXd dx;
    try {
      BlockSparseMatrix jac = jacobian(x);
      Eigen::VectorXd rhs = -r;
      if (cfg.constrain) cfg.constrain(x, jac, rhs);
      dx = linear.solve(jac, rhs);
    } catch (const LinearSolveError& e) {
      rep.residual_norm = norm;
      throw NewtonError("Newton: linear solve failed at iteration " + std::to_string(rep.iterations) + ": " +
                            e.what(),
                        rep);
    }
    ++rep.iterations;

    double step = 1.0;
    Eigen::VectorXd trial = x + dx;
    if (cfg.project) cfg.project(trial);
    Eigen::VectorXd rt = residual(trial);
    double nt = rt.norm();
    for (int h = 0; h < cfg.max_halvings && !(nt < norm); ++h) {
      step *= 0.5;
      trial = x + step * dx;
      if (cfg.project) cfg.project(trial);
      rt = residual(trial);
      nt = rt.norm();
    }
    // Without a decrease the smallest step is taken anyway; max_iters bounds the loop.
    x = std::move(trial);
    r = std::move(rt);
    norm = nt;
    rep.history.push_back(norm);
  }
  rep.residual_norm = norm;
  return rep;
}

}  // namespace chdg
