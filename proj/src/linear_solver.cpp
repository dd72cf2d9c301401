#include "chdg/linear_solver.hpp"

#include <cmath>
#include <vector>

#ifdef CHDG_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

namespace chdg {

namespace {

using Index = Eigen::Index;

double relative_residual(const BlockSparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double nb = b.norm();
  const double nr = (b - a.multiply(x)).norm();
  return nb > 0.0 ? nr / nb : nr;
}

}  // namespace

#ifdef CHDG_HAVE_UMFPACK
struct LinearSolver::Umfpack {
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
  std::size_t rows = 0;
};
bool have_umfpack() { return true; }
#else
struct LinearSolver::Umfpack {};
bool have_umfpack() { return false; }
#endif

LinearMethod parse_linear_method(const std::string& name) {
  if (name == "auto") return LinearMethod::Auto;
  if (name == "dense") return LinearMethod::Dense;
  if (name == "bicgstab") return LinearMethod::BiCGStab;
  if (name == "sparselu") return LinearMethod::SparseLU;
  if (name == "umfpack") return LinearMethod::Umfpack;
  throw std::invalid_argument("unknown linear solver '" + name + "' (auto, dense, bicgstab, sparselu, umfpack)");
}

std::string to_string(LinearMethod m) {
  switch (m) {
    case LinearMethod::Auto: return "auto";
    case LinearMethod::Dense: return "dense";
    case LinearMethod::BiCGStab: return "bicgstab";
    case LinearMethod::SparseLU: return "sparselu";
    case LinearMethod::Umfpack: return "umfpack";
  }
  return "?";
}

LinearSolver::LinearSolver(LinearSolverConfig cfg) : cfg_(cfg) {
  if (!(cfg_.rel_tol > 0.0)) throw std::invalid_argument("LinearSolver: rel_tol must be positive");
}

Eigen::VectorXd LinearSolver::solve(const BlockSparseMatrix& a, const Eigen::VectorXd& rhs) {
  if (static_cast<std::size_t>(rhs.size()) != a.rows()) {
    throw std::invalid_argument("LinearSolver: rhs size does not match matrix");
  }
  switch (cfg_.method) {
    case LinearMethod::Dense: return solve_dense(a, rhs);
    case LinearMethod::BiCGStab: return solve_bicgstab(a, rhs);
    case LinearMethod::SparseLU: return solve_sparse_lu(a, rhs);
    case LinearMethod::Umfpack: return solve_umfpack(a, rhs);
    case LinearMethod::Auto: break;
  }
  if (a.rows() < cfg_.dense_threshold) return solve_dense(a, rhs);
  if (have_umfpack()) return solve_umfpack(a, rhs);
  try {
    return solve_bicgstab(a, rhs);
  } catch (const LinearSolveError&) {
    return solve_sparse_lu(a, rhs);
  }
}

Eigen::VectorXd LinearSolver::solve_dense(const BlockSparseMatrix& a, const Eigen::VectorXd& rhs) {
  const Eigen::MatrixXd m = a.to_dense();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const double rc = lu.rcond();
  if (!(rc > 1e-16)) throw LinearSolveError("dense LU: matrix is singular (rcond " + std::to_string(rc) + ")", 1.0);
  Eigen::VectorXd x = lu.solve(rhs);
  const double rr = relative_residual(a, x, rhs);
  if (!std::isfinite(rr)) throw LinearSolveError("dense LU: non-finite solution", rr);
  last_ = {LinearMethod::Dense, 1, rr};
  return x;
}

Eigen::VectorXd LinearSolver::solve_sparse_lu(const BlockSparseMatrix& a, const Eigen::VectorXd& rhs) {
  const Eigen::SparseMatrix<double> m = a.to_sparse();
  if (!lu_ || lu_rows_ != a.rows()) {
    lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu_->analyzePattern(m);
    lu_rows_ = a.rows();
  }
  lu_->factorize(m);
  if (lu_->info() != Eigen::Success) {
    throw LinearSolveError("sparse LU: factorization failed: " + lu_->lastErrorMessage(), 1.0);
  }
  Eigen::VectorXd x = lu_->solve(rhs);
  const double rr = relative_residual(a, x, rhs);
  if (!std::isfinite(rr) || rr > 1e-6) throw LinearSolveError("sparse LU: inaccurate solve", rr);
  last_ = {LinearMethod::SparseLU, 1, rr};
  return x;
}

Eigen::VectorXd LinearSolver::solve_umfpack(const BlockSparseMatrix& a, const Eigen::VectorXd& rhs) {
#ifdef CHDG_HAVE_UMFPACK
  const Eigen::SparseMatrix<double> m = a.to_sparse();
  if (!umf_ || umf_->rows != a.rows()) {
    umf_ = std::make_shared<Umfpack>();
    umf_->lu.analyzePattern(m);
    umf_->rows = a.rows();
  }
  umf_->lu.factorize(m);
  if (umf_->lu.info() != Eigen::Success) throw LinearSolveError("UMFPACK: factorization failed", 1.0);
  Eigen::VectorXd x = umf_->lu.solve(rhs);
  const double rr = relative_residual(a, x, rhs);
  if (!std::isfinite(rr) || rr > 1e-6) throw LinearSolveError("UMFPACK: inaccurate solve", rr);
  last_ = {LinearMethod::Umfpack, 1, rr};
  return x;
#else
  (void)a;
  (void)rhs;
  throw std::invalid_argument("UMFPACK support was not compiled in");
#endif
}

Eigen::VectorXd LinearSolver::solve_bicgstab(const BlockSparseMatrix& a, const Eigen::VectorXd& rhs) {
  const auto bs = static_cast<Index>(a.block_size());
  const std::size_t nb = a.num_block_rows();
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> diag;
  diag.reserve(nb);
  for (std::size_t k = 0; k < nb; ++k) diag.emplace_back(Eigen::MatrixXd(a.block(k, k)));
  auto precond = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd z(v.size());
    for (std::size_t k = 0; k < nb; ++k) {
      z.segment(static_cast<Index>(k) * bs, bs) = diag[k].solve(v.segment(static_cast<Index>(k) * bs, bs));
    }
    return z;
  };

  const double bnorm = rhs.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
  if (bnorm == 0.0) {
    last_ = {LinearMethod::BiCGStab, 0, 0.0};
    return x;
  }
  const double target = cfg_.rel_tol * bnorm;
  Eigen::VectorXd r = rhs;
  double rnorm = bnorm;
  int it = 0;
  int restarts = 0;
  while (it < cfg_.max_iters && restarts < 5) {
    // Right-preconditioned BiCGStab; restarted from the current iterate on breakdown.
    const Eigen::VectorXd r0 = r;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(rhs.size()), v = p;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    bool breakdown = false;
    while (it < cfg_.max_iters) {
      ++it;
      const double rho_new = r0.dot(r);
      if (std::abs(rho_new) < 1e-300 || omega == 0.0) {
        breakdown = true;
        break;
      }
      const double beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
      p = r + beta * (p - omega * v);
      const Eigen::VectorXd ph = precond(p);
      v = a.multiply(ph);
      const double r0v = r0.dot(v);
      if (r0v == 0.0) {
        breakdown = true;
        break;
      }
      alpha = rho / r0v;
      const Eigen::VectorXd s = r - alpha * v;
      if (s.norm() <= target) {
        x += alpha * ph;
        r = s;
        rnorm = s.norm();
        break;
      }
      const Eigen::VectorXd sh = precond(s);
      const Eigen::VectorXd t = a.multiply(sh);
      const double tt = t.squaredNorm();
      omega = tt > 0.0 ? t.dot(s) / tt : 0.0;
      x += alpha * ph + omega * sh;
      r = s - omega * t;
      rnorm = r.norm();
      if (rnorm <= target || omega == 0.0) break;
    }
    // Guard against drift between recursive and true residual.
    r = rhs - a.multiply(x);
    rnorm = r.norm();
    if (rnorm <= target) break;
    if (!breakdown && it >= cfg_.max_iters) break;
    ++restarts;
  }
  const double rr = rnorm / bnorm;
  if (!(rr <= cfg_.rel_tol)) {
    throw LinearSolveError("BiCGStab stagnated after " + std::to_string(it) + " iterations", rr);
  }
  last_ = {LinearMethod::BiCGStab, it, rr};
  return x;
}

}  // namespace chdg
