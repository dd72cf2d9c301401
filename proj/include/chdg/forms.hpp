#pragma once

#include "chdg/field.hpp"
#include "chdg/sparse.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <vector>

namespace chdg {

/// Parameters of the fully discrete scheme.
struct SchemeParams {
  double pe = 1.0;           ///< Peclet number
  double cn = 0.01;          ///< Cahn number
  double tau = 1e-4;         ///< time increment
  double eta = 6.0;          ///< penalty of the mobility form
  double eta_laplace = 6.0;  ///< penalty of the Laplacian form, >= eta
  bool source_enabled = false;
  bool advection_enabled = false;
  /// Multiply the phi equation by tau: same root, but the residual floor
  /// does not grow like 1/tau.
  bool time_scaled = true;

  void validate() const;
};

/// Trace constant C_T = k (k + d - 1) / d with d = 2.
double trace_constant(int order);

/// max(floor, max_K m_K C_T): smallest penalty covered by the coercivity bound.
double auto_penalty(const MeshTopology& mesh, int order, double floor);

/// M(s) = max{1 - s^2, 0}.
double mobility(double s);
/// One-sided derivative of M; zero for |s| >= 1.
double mobility_derivative(double s);

/// 2ab / (a + b), zero when a + b = 0. Throws for negative input.
double harmonic_average(double a, double b);

struct PotentialTerms {
  double w;         ///< W(s) = (s^2 - 1)^2 / 4
  double dw;        ///< W'(s)
  double convex;    ///< Phi+(s) = s^3
  double concave;   ///< Phi-(s) = -s
};
PotentialTerms potential_terms(double s);

/// Cell mobilities M(phi_bar_K) and interior-face harmonic averages.
struct MobilityCoefficients {
  std::vector<double> cell;
  std::vector<double> face;  // indexed by face id; zero on boundary faces
};

/// Linear DG building blocks precomputed once per space: cell stiffness
/// matrices and, for every interior face, the penalty and consistency
/// blocks over the stacked (minus, plus) dofs.
///
///   penalty(a,b)_ij     = (1/h_e) int_e [phi^a_i][phi^b_j]
///   consistency(a,b)_ij = -int_e {grad phi^b_j . n}[phi^a_i] + {grad phi^a_i . n}[phi^b_j]
///
/// so that the interior penalty form with weight w and penalty eta is
/// w * (eta * penalty + consistency). Rows are test functions.
class DGForms {
 public:
  explicit DGForms(std::shared_ptr<const DGSpace> space);

  const DGSpace& space() const { return *space_; }
  const std::shared_ptr<const DGSpace>& space_ptr() const { return space_; }

  const Eigen::MatrixXd& cell_stiffness(std::size_t k) const { return stiffness_[k]; }
  const Eigen::MatrixXd& face_penalty(std::size_t f) const { return penalty_[f]; }
  const Eigen::MatrixXd& face_consistency(std::size_t f) const { return consistency_[f]; }

  /// Stacked (minus, plus) coefficients of an interior face.
  Eigen::VectorXd face_dofs(const DiscreteField& field, std::size_t f) const;

  /// SIPG Laplacian a(phi, xi) over interior faces.
  double laplace(const DiscreteField& phi, const DiscreteField& xi, double eta) const;
  /// SWIP mobility form b(M, mu, psi); faces with zero weight are skipped.
  double swip(const MobilityCoefficients& mob, const DiscreteField& mu, const DiscreteField& psi,
              double eta) const;
  /// ||sqrt(M) grad v||^2 + sum_e (<<M>>/h_e) int_e [v]^2.
  double dg_seminorm_squared(const MobilityCoefficients& mob, const DiscreteField& v) const;
  /// Parts of the DG seminorm: (volume part, face part).
  std::pair<double, double> dg_seminorm_parts(const MobilityCoefficients& mob,
                                              const DiscreteField& v) const;

  MobilityCoefficients mobility_of(const DiscreteField& phi) const;
  /// Unit weights on every cell and face.
  MobilityCoefficients unit_mobility() const;

  /// Operator matrix of b(M, ., .) (block size n_p).
  BlockSparseMatrix assemble_swip(const MobilityCoefficients& mob, double eta) const;
  BlockSparseMatrix assemble_laplace(double eta) const;

 private:
  void check(const DiscreteField& f) const;

  std::shared_ptr<const DGSpace> space_;
  std::vector<Eigen::MatrixXd> stiffness_;
  std::vector<Eigen::MatrixXd> penalty_;
  std::vector<Eigen::MatrixXd> consistency_;
};

/// Upwind advection form
///   c(u, phibar, psi) = int u . grad psi phibar - sum_e int_e F [psi],
///   F = (u.n)_+ phibar^- + (u.n)_- phibar^+,
/// with phibar piecewise constant. The velocity is integrated once.
class UpwindAdvection {
 public:
  UpwindAdvection(std::shared_ptr<const DGSpace> space, VectorFunction velocity);

  /// phibar is taken from the cell averages of the given field.
  double apply(const DiscreteField& phibar, const DiscreteField& psi) const;
  /// Vector of c(u, phibar, phi_{K,i}) over all test dofs.
  Eigen::VectorXd apply_all(const std::vector<double>& cell_means) const;
  /// d c(u, phibar, phi_{L,i}) / d phibar_K as a block-sparse matrix with
  /// block size n_p whose column 0 of each block carries the derivative.
  BlockSparseMatrix derivative() const;

 private:
  std::shared_ptr<const DGSpace> space_;
  std::vector<Eigen::VectorXd> volume_;       // int_K u . grad phi_i
  std::vector<Eigen::VectorXd> upwind_;      // stacked (minus, plus): int (u.n)_+ [phi]
  std::vector<Eigen::VectorXd> downwind_;    // stacked (minus, plus): int (u.n)_- [phi]
};

/// Coupled residual and Jacobian of the SWIPDP time step. Unknowns are
/// ordered per cell as [phi_0..phi_{n-1}, mu_0..mu_{n-1}].
class SwipdpScheme {
 public:
  SwipdpScheme(std::shared_ptr<const DGSpace> space, SchemeParams params,
               std::optional<ScalarFunction> source = std::nullopt,
               std::optional<VectorFunction> velocity = std::nullopt);

  const DGSpace& space() const { return forms_.space(); }
  const DGForms& forms() const { return forms_; }
  const SchemeParams& params() const { return params_; }
  std::size_t num_unknowns() const { return 2 * space().num_dofs(); }
  /// Same scheme with a different time increment.
  SwipdpScheme with_tau(double tau) const;

  Eigen::VectorXd pack(const DiscreteField& phi, const DiscreteField& mu) const;
  void unpack(const Eigen::VectorXd& x, DiscreteField& phi, DiscreteField& mu) const;

  /// Residual of the time step from phi_old to (phi, mu).
  Eigen::VectorXd residual(const CoupledState& state_new, const DiscreteField& phi_old) const;
  Eigen::VectorXd residual(const Eigen::VectorXd& x, const DiscreteField& phi_old) const;

  BlockSparseMatrix jacobian(const CoupledState& state_new, const DiscreteField& phi_old) const;
  BlockSparseMatrix jacobian(const Eigen::VectorXd& x, const DiscreteField& phi_old) const;

  /// <S, phi_{K,i}> for the manufactured source (zero when disabled).
  const Eigen::VectorXd& source_load() const { return source_load_; }
  const UpwindAdvection* advection() const { return advection_ ? &*advection_ : nullptr; }

 private:
  void check(const DiscreteField& f) const;

  DGForms forms_;
  SchemeParams params_;
  Eigen::VectorXd source_load_;
  std::optional<UpwindAdvection> advection_;
};

}  // namespace chdg
