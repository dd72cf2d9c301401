#pragma once

#include "chdg/sparse.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <memory>
#include <stdexcept>
#include <string>

namespace chdg {

enum class LinearMethod { Auto, Dense, BiCGStab, SparseLU, Umfpack };

/// True when the library was built against UMFPACK.
bool have_umfpack();

LinearMethod parse_linear_method(const std::string& name);
std::string to_string(LinearMethod m);

struct LinearSolverConfig {
  LinearMethod method = LinearMethod::Auto;
  double rel_tol = 1e-13;
  int max_iters = 1000;
  // Auto: dense LU below this many unknowns, otherwise UMFPACK when
  // available, otherwise BiCGStab with a sparse LU fallback.
  std::size_t dense_threshold = 2000;
};

/// Raised when a solve fails to reach its tolerance.
class LinearSolveError : public std::runtime_error {
 public:
  LinearSolveError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  /// Relative residual reached before giving up.
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

struct LinearSolveStats {
  LinearMethod method = LinearMethod::Dense;
  int iterations = 0;
  double rel_residual = 0.0;
};

/// Stateful solver: the sparse LU symbolic analysis is kept between calls
/// since the block pattern never changes during a run.
class LinearSolver {
 public:
  explicit LinearSolver(LinearSolverConfig cfg = {});

  Eigen::VectorXd solve(const BlockSparseMatrix& a, const Eigen::VectorXd& rhs);
  const LinearSolveStats& last() const { return last_; }
  const LinearSolverConfig& config() const { return cfg_; }

 private:
  Eigen::VectorXd solve_dense(const BlockSparseMatrix& a, const Eigen::VectorXd& rhs);
  Eigen::VectorXd solve_bicgstab(const BlockSparseMatrix& a, const Eigen::VectorXd& rhs);
  Eigen::VectorXd solve_sparse_lu(const BlockSparseMatrix& a, const Eigen::VectorXd& rhs);
  Eigen::VectorXd solve_umfpack(const BlockSparseMatrix& a, const Eigen::VectorXd& rhs);

  LinearSolverConfig cfg_;
  LinearSolveStats last_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
  std::size_t lu_rows_ = 0;
  struct Umfpack;
  std::shared_ptr<Umfpack> umf_;
};

}  // namespace chdg
