#pragma once

#include "chdg/linear_solver.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chdg {

struct NewtonConfig {
  double tol = 1e-10;  // Euclidean norm of the residual
  int max_iters = 25;
  int max_halvings = 8;
  // Applied to every trial iterate before its residual is evaluated.
  std::function<void(Eigen::VectorXd&)> project;
  // May edit the Newton system J dx = rhs at the current iterate x.
  std::function<void(const Eigen::VectorXd& x, BlockSparseMatrix& jac, Eigen::VectorXd& rhs)> constrain;
  LinearSolverConfig linear;
};

struct NewtonReport {
  int iterations = 0;
  double residual_norm = 0.0;
  std::vector<double> history;  // residual norm before each iteration, then the final one
};

class NewtonError : public std::runtime_error {
 public:
  NewtonError(const std::string& what, NewtonReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const NewtonReport& report() const { return report_; }
  double residual_norm() const { return report_.residual_norm; }

 private:
  NewtonReport report_;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<BlockSparseMatrix(const Eigen::VectorXd&)>;

/// Damped Newton iteration. On success x holds the root; on failure a
/// NewtonError carries the iteration history and x the last iterate.
NewtonReport newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, Eigen::VectorXd& x,
                          const NewtonConfig& cfg, LinearSolver& linear);

}  // namespace chdg
