#pragma once

#include "chdg/mesh.hpp"
#include "chdg/quadrature.hpp"

#include <Eigen/Dense>

#include <memory>
#include <utility>
#include <vector>

namespace chdg {

/// Modal orthogonal basis on a reference element with phi_0 = 1 and
/// <phi_i, phi_j>_ref = delta_ij * |ref|. Under an affine map this gives
/// <phi_i, phi_j>_K = delta_ij * |K|, so the first coefficient of any
/// expansion is the cell average.
///
/// Quads use tensor-product Legendre polynomials (Q_p, (p+1)^2 modes);
/// triangles use the Dubiner basis (P_p, (p+1)(p+2)/2 modes). Modes are
/// ordered by total degree.
class ReferenceBasis {
 public:
  ReferenceBasis(CellType type, int order);

  CellType cell_type() const { return type_; }
  int order() const { return order_; }
  std::size_t size() const { return modes_.size(); }
  double reference_measure() const { return type_ == CellType::Quad ? 1.0 : 0.5; }

  /// Values of every mode at a reference point.
  Eigen::VectorXd values(const Vec2& ref) const;
  /// Reference-coordinate gradients of every mode (row i = grad phi_i).
  Eigen::Matrix<double, Eigen::Dynamic, 2> gradients(const Vec2& ref) const;

  /// Volume rule of exactness max(4p, 2p + 2) and its tabulation.
  const QuadratureRule& volume_rule() const { return volume_rule_; }
  /// Face rule of exactness 2p + 2.
  const QuadratureRule& face_rule() const { return face_rule_; }
  /// values_at_quadrature()(q, i) = phi_i(x_q).
  const Eigen::MatrixXd& values_at_quadrature() const { return volume_values_; }
  /// Reference gradients at volume points: [q] -> (n x 2).
  const std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2>>& gradients_at_quadrature() const {
    return volume_gradients_;
  }

 private:
  void evaluate(const Vec2& ref, double* values, double* dx, double* dy) const;

  CellType type_;
  int order_;
  std::vector<std::pair<int, int>> modes_;
  std::vector<double> scale_;
  QuadratureRule volume_rule_;
  QuadratureRule face_rule_;
  Eigen::MatrixXd volume_values_;
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2>> volume_gradients_;
};

std::shared_ptr<const ReferenceBasis> make_basis(CellType type, int order);

inline int volume_quadrature_degree(int p) { return std::max(4 * p, 2 * p + 2); }
inline int face_quadrature_degree(int p) { return 2 * p + 2; }

}  // namespace chdg
