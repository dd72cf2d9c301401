#include "chdg/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace chdg {

DGSpace::DGSpace(std::shared_ptr<const MeshTopology> mesh, std::shared_ptr<const ReferenceBasis> basis)
    : mesh_(std::move(mesh)), basis_(std::move(basis)) {
  if (!mesh_ || !basis_) throw std::invalid_argument("DGSpace: null mesh or basis");
  for (const auto& c : mesh_->cells()) {
    if (c.type != basis_->cell_type()) {
      throw std::invalid_argument("DGSpace: basis cell type does not match mesh");
    }
  }
}

std::shared_ptr<const DGSpace> make_space(std::shared_ptr<const MeshTopology> mesh, int order) {
  auto basis = make_basis(mesh->cell_type(), order);
  return std::make_shared<const DGSpace>(std::move(mesh), std::move(basis));
}

DiscreteField::DiscreteField(std::shared_ptr<const DGSpace> space)
    : space_(std::move(space)),
      coeffs_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space_->num_dofs()))) {}

DiscreteField::DiscreteField(std::shared_ptr<const DGSpace> space, Eigen::VectorXd coefficients)
    : space_(std::move(space)), coeffs_(std::move(coefficients)) {
  if (coeffs_.size() != static_cast<Eigen::Index>(space_->num_dofs())) {
    throw std::invalid_argument("DiscreteField: coefficient vector has wrong size");
  }
}

CoupledState::CoupledState(DiscreteField phi_, DiscreteField mu_, double t, int n)
    : phi(std::move(phi_)), mu(std::move(mu_)), time(t), step(n) {
  if (!phi.space().same_as(mu.space())) {
    throw std::invalid_argument("CoupledState: phi and mu must share one space");
  }
}

double cell_average(const DiscreteField& field, std::size_t k) {
  if (k >= field.space().num_cells()) {
    throw std::out_of_range("cell_average: cell index " + std::to_string(k) + " out of range");
  }
  return field(k, 0);
}

DiscreteField project_p0(const DiscreteField& field) {
  const auto& space = field.space();
  auto p0 = space.order() == 0 ? field.space_ptr() : make_space(space.mesh_ptr(), 0);
  DiscreteField out(p0);
  for (std::size_t k = 0; k < space.num_cells(); ++k) out(k, 0) = field(k, 0);
  return out;
}

QuadratureRule projection_rule(const ReferenceBasis& basis) {
  return make_quadrature(basis.cell_type(), volume_quadrature_degree(basis.order()) + 4);
}

DiscreteField project_l2(const ScalarFunction& f, std::shared_ptr<const DGSpace> space) {
  const auto& basis = space->basis();
  const auto rule = projection_rule(basis);
  std::vector<Eigen::VectorXd> table;
  table.reserve(rule.size());
  for (const auto& pt : rule.points) table.push_back(basis.values(pt));

  DiscreteField out(space);
  const double ref = basis.reference_measure();
  for (std::size_t k = 0; k < space->num_cells(); ++k) {
    const auto& cell = space->mesh().cell(k);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t q = 0; q < rule.size(); ++q) {
      acc += rule.weights[q] * f(cell.map_to_physical(rule.points[q])) * table[q];
    }
    // <f, phi_j>_K / |K| = (|det J| sum w f phi_j) / (|det J| |ref|)
    out.cell_coefficients(k) = acc / ref;
  }
  return out;
}

double evaluate(const DiscreteField& field, std::size_t k, const Vec2& ref) {
  return field.space().basis().values(ref).dot(field.cell_coefficients(k));
}

double evaluate_physical(const DiscreteField& field, std::size_t k, const Vec2& x) {
  return evaluate(field, k, field.space().mesh().cell(k).map_to_reference(x));
}

Vec2 evaluate_gradient(const DiscreteField& field, std::size_t k, const Vec2& ref) {
  const auto g = field.space().basis().gradients(ref);
  const Vec2 ref_grad = g.transpose() * field.cell_coefficients(k);
  return field.space().mesh().cell(k).inverse_jacobian.transpose() * ref_grad;
}

double mass(const DiscreteField& field) {
  const auto& mesh = field.space().mesh();
  double s = 0.0, area = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    s += mesh.cell(k).measure * field(k, 0);
    area += mesh.cell(k).measure;
  }
  return s / area;
}

double cell_l2_norm_squared(const DiscreteField& field, std::size_t k) {
  return field.space().mesh().cell(k).measure * field.cell_coefficients(k).squaredNorm();
}

double l2_norm(const DiscreteField& field) {
  double s = 0.0;
  for (std::size_t k = 0; k < field.space().num_cells(); ++k) s += cell_l2_norm_squared(field, k);
  return std::sqrt(s);
}

namespace {

std::vector<Vec2> reference_vertices(CellType type) {
  if (type == CellType::Quad) return {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  return {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
}

}  // namespace

SampleSet make_sample_set(const ReferenceBasis& basis, SampleMode mode) {
  SampleSet s;
  const auto verts = reference_vertices(basis.cell_type());
  if (mode == SampleMode::Quadrature) {
    s.points = basis.volume_rule().points;
  } else {
    s.points = verts;
  }
  for (std::size_t e = 0; e < verts.size(); ++e) {
    const Vec2& a = verts[e];
    const Vec2& b = verts[(e + 1) % verts.size()];
    for (const auto& t : basis.face_rule().points) s.points.push_back((1.0 - t.x()) * a + t.x() * b);
  }
  s.values.resize(static_cast<Eigen::Index>(s.points.size()), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    s.values.row(static_cast<Eigen::Index>(i)) = basis.values(s.points[i]).transpose();
  }
  return s;
}

std::pair<double, double> sample_extrema(const DiscreteField& field, const SampleSet& samples) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < field.space().num_cells(); ++k) {
    const Eigen::VectorXd v = samples.values * field.cell_coefficients(k);
    lo = std::min(lo, v.minCoeff());
    hi = std::max(hi, v.maxCoeff());
  }
  return {lo, hi};
}

std::pair<double, double> l2_h1_errors(const DiscreteField& field, const ScalarFunction& exact,
                                       const VectorFunction& exact_gradient) {
  const auto& space = field.space();
  const auto& basis = space.basis();
  const auto rule = projection_rule(basis);
  double l2 = 0.0, h1 = 0.0;
  for (std::size_t k = 0; k < space.num_cells(); ++k) {
    const auto& cell = space.mesh().cell(k);
    const double det = std::abs(cell.jacobian.determinant());
    const Eigen::VectorXd c = field.cell_coefficients(k);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 x = cell.map_to_physical(rule.points[q]);
      const double uh = basis.values(rule.points[q]).dot(c);
      const Vec2 guh = cell.inverse_jacobian.transpose() * (basis.gradients(rule.points[q]).transpose() * c);
      const double w = rule.weights[q] * det;
      l2 += w * std::pow(exact(x) - uh, 2);
      h1 += w * (exact_gradient(x) - guh).squaredNorm();
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

}  // namespace chdg
