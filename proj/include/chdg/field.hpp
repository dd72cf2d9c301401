#pragma once

#include "chdg/basis.hpp"
#include "chdg/mesh.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <utility>

namespace chdg {

using ScalarFunction = std::function<double(const Vec2&)>;
using VectorFunction = std::function<Vec2(const Vec2&)>;

/// Broken polynomial space V_h^p: a mesh plus one reference basis.
class DGSpace {
 public:
  DGSpace(std::shared_ptr<const MeshTopology> mesh, std::shared_ptr<const ReferenceBasis> basis);

  const MeshTopology& mesh() const { return *mesh_; }
  const ReferenceBasis& basis() const { return *basis_; }
  const std::shared_ptr<const MeshTopology>& mesh_ptr() const { return mesh_; }
  const std::shared_ptr<const ReferenceBasis>& basis_ptr() const { return basis_; }

  std::size_t num_cells() const { return mesh_->num_cells(); }
  std::size_t dofs_per_cell() const { return basis_->size(); }
  std::size_t num_dofs() const { return num_cells() * dofs_per_cell(); }
  int order() const { return basis_->order(); }

  bool same_as(const DGSpace& other) const {
    return mesh_ == other.mesh_ && basis_ == other.basis_;
  }

 private:
  std::shared_ptr<const MeshTopology> mesh_;
  std::shared_ptr<const ReferenceBasis> basis_;
};

/// Build a space of order p on the given mesh.
std::shared_ptr<const DGSpace> make_space(std::shared_ptr<const MeshTopology> mesh, int order);

/// Member of V_h^p stored as modal coefficients, contiguous per cell.
class DiscreteField {
 public:
  explicit DiscreteField(std::shared_ptr<const DGSpace> space);
  DiscreteField(std::shared_ptr<const DGSpace> space, Eigen::VectorXd coefficients);

  const DGSpace& space() const { return *space_; }
  const std::shared_ptr<const DGSpace>& space_ptr() const { return space_; }

  Eigen::VectorXd& coefficients() { return coeffs_; }
  const Eigen::VectorXd& coefficients() const { return coeffs_; }

  auto cell_coefficients(std::size_t k) {
    const auto n = static_cast<Eigen::Index>(space_->dofs_per_cell());
    return coeffs_.segment(static_cast<Eigen::Index>(k) * n, n);
  }
  auto cell_coefficients(std::size_t k) const {
    const auto n = static_cast<Eigen::Index>(space_->dofs_per_cell());
    return coeffs_.segment(static_cast<Eigen::Index>(k) * n, n);
  }

  /// Coefficient j of cell k.
  double& operator()(std::size_t k, std::size_t j) { return coeffs_[index(k, j)]; }
  double operator()(std::size_t k, std::size_t j) const { return coeffs_[index(k, j)]; }

 private:
  Eigen::Index index(std::size_t k, std::size_t j) const {
    return static_cast<Eigen::Index>(k * space_->dofs_per_cell() + j);
  }

  std::shared_ptr<const DGSpace> space_;
  Eigen::VectorXd coeffs_;
};

/// Phase field and chemical potential at one time level.
struct CoupledState {
  DiscreteField phi;
  DiscreteField mu;
  double time = 0.0;
  int step = 0;

  CoupledState(DiscreteField phi_, DiscreteField mu_, double t = 0.0, int n = 0);
};

/// |K|^{-1} int_K field. Throws std::out_of_range for a bad index.
double cell_average(const DiscreteField& field, std::size_t k);

/// Piecewise-constant field of cell averages.
DiscreteField project_p0(const DiscreteField& field);

/// L2 projection of f; exact for polynomials of degree <= p on each cell.
DiscreteField project_l2(const ScalarFunction& f, std::shared_ptr<const DGSpace> space);

/// Value at a reference point of cell k.
double evaluate(const DiscreteField& field, std::size_t k, const Vec2& ref);

/// Value at a physical point inside cell k.
double evaluate_physical(const DiscreteField& field, std::size_t k, const Vec2& x);

/// Physical gradient at a reference point of cell k.
Vec2 evaluate_gradient(const DiscreteField& field, std::size_t k, const Vec2& ref);

/// |Omega|^{-1} sum_K |K| c_{K,0}.
double mass(const DiscreteField& field);

/// ||field||_{L2(K)}^2 from Parseval: |K| sum_j c_{K,j}^2.
double cell_l2_norm_squared(const DiscreteField& field, std::size_t k);

double l2_norm(const DiscreteField& field);

enum class SampleMode {
  Quadrature,  ///< volume quadrature points plus face quadrature points
  Boundary,    ///< face quadrature points plus cell vertices
};

/// Finite set of reference points where pointwise bounds are checked,
/// tabulated against the basis. Shared by all cells of the mesh.
struct SampleSet {
  std::vector<Vec2> points;
  Eigen::MatrixXd values;  // values(s, j) = phi_j(points[s])
};

SampleSet make_sample_set(const ReferenceBasis& basis, SampleMode mode);

/// (min, max) over all cells and sample points.
std::pair<double, double> sample_extrema(const DiscreteField& field, const SampleSet& samples);

/// Quadrature rule used for projections and error integrals.
QuadratureRule projection_rule(const ReferenceBasis& basis);

/// L2 error and broken H1 seminorm error against an exact solution.
std::pair<double, double> l2_h1_errors(const DiscreteField& field, const ScalarFunction& exact,
                                       const VectorFunction& exact_gradient);

}  // namespace chdg
