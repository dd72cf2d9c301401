#include "chdg/forms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chdg {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

// Physical gradients (n x 2) of all modes at a reference point of a cell.
Eigen::Matrix<double, Eigen::Dynamic, 2> physical_gradients(const ReferenceBasis& basis, const Cell& cell,
                                                            const Vec2& ref) {
  return basis.gradients(ref) * cell.inverse_jacobian;
}

}  // namespace

void SchemeParams::validate() const {
  if (!(pe > 0.0)) throw std::invalid_argument("SchemeParams: Pe must be positive");
  if (!(cn > 0.0)) throw std::invalid_argument("SchemeParams: Cn must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("SchemeParams: tau must be positive");
  if (!(eta > 0.0)) throw std::invalid_argument("SchemeParams: eta must be positive");
  if (!(eta_laplace > 0.0)) throw std::invalid_argument("SchemeParams: eta_laplace must be positive");
}

double trace_constant(int order) {
  const double k = order;
  constexpr double d = 2.0;
  return k * (k + d - 1.0) / d;
}

double auto_penalty(const MeshTopology& mesh, int order, double floor) {
  const double ct = trace_constant(order);
  int m = 0;
  for (int c : mesh.cell_face_counts()) m = std::max(m, c);
  return std::max(floor, m * ct);
}

double mobility(double s) { return std::max(1.0 - s * s, 0.0); }

double mobility_derivative(double s) { return std::abs(s) < 1.0 ? -2.0 * s : 0.0; }

double harmonic_average(double a, double b) {
  if (a < 0.0 || b < 0.0) {
    throw std::invalid_argument("harmonic_average: negative argument (" + std::to_string(a) + ", " +
                                std::to_string(b) + ")");
  }
  const double s = a + b;
  return s > 0.0 ? 2.0 * a * b / s : 0.0;
}

namespace {

// d<<M>>/dM_a; zero in the doubly degenerate limit.
double harmonic_average_derivative(double a, double b) {
  const double s = a + b;
  if (s < 1e-14) return 0.0;
  return 2.0 * b * b / (s * s);
}

}  // namespace

PotentialTerms potential_terms(double s) {
  const double s2 = s * s;
  return {0.25 * (s2 - 1.0) * (s2 - 1.0), s2 * s - s, s2 * s, -s};
}

// ---------------------------------------------------------------------------

DGForms::DGForms(std::shared_ptr<const DGSpace> space) : space_(std::move(space)) {
  const auto& mesh = space_->mesh();
  const auto& basis = space_->basis();
  const auto& vrule = basis.volume_rule();
  const auto& frule = basis.face_rule();
  const std::size_t n = basis.size();

  stiffness_.reserve(mesh.num_cells());
  for (const auto& cell : mesh.cells()) {
    const double det = std::abs(cell.jacobian.determinant());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(idx(n), idx(n));
    for (std::size_t q = 0; q < vrule.size(); ++q) {
      const auto g = basis.gradients_at_quadrature()[q] * cell.inverse_jacobian;
      s.noalias() += (vrule.weights[q] * det) * g * g.transpose();
    }
    stiffness_.push_back(std::move(s));
  }

  penalty_.resize(mesh.num_faces());
  consistency_.resize(mesh.num_faces());
  const auto& coords = mesh.vertices();
  for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& f = mesh.faces()[fi];
    if (f.is_boundary) continue;
    const Cell& cm = mesh.cell(f.minus_cell);
    const Cell& cp = mesh.cell(f.plus_cell);
    Eigen::MatrixXd pen = Eigen::MatrixXd::Zero(idx(2 * n), idx(2 * n));
    Eigen::MatrixXd con = Eigen::MatrixXd::Zero(idx(2 * n), idx(2 * n));
    Eigen::VectorXd jump(idx(2 * n)), avg(idx(2 * n));
    for (std::size_t q = 0; q < frule.size(); ++q) {
      const Vec2 x = f.point(coords, frule.points[q].x());
      const Vec2 rm = cm.map_to_reference(x);
      const Vec2 rp = cp.map_to_reference(x);
      jump.head(idx(n)) = basis.values(rm);
      jump.tail(idx(n)) = -basis.values(rp);
      avg.head(idx(n)) = 0.5 * physical_gradients(basis, cm, rm) * f.unit_normal;
      avg.tail(idx(n)) = 0.5 * physical_gradients(basis, cp, rp) * f.unit_normal;
      const double w = frule.weights[q] * f.length;
      pen.noalias() += (w / f.h_e) * jump * jump.transpose();
      con.noalias() -= w * (jump * avg.transpose() + avg * jump.transpose());
    }
    penalty_[fi] = std::move(pen);
    consistency_[fi] = std::move(con);
  }
}

void DGForms::check(const DiscreteField& f) const {
  if (!f.space().same_as(*space_)) throw std::invalid_argument("DGForms: field from a different space");
}

Eigen::VectorXd DGForms::face_dofs(const DiscreteField& field, std::size_t fi) const {
  const Face& f = space_->mesh().faces()[fi];
  const auto n = idx(space_->dofs_per_cell());
  Eigen::VectorXd v(2 * n);
  v.head(n) = field.cell_coefficients(f.minus_cell);
  v.tail(n) = field.cell_coefficients(f.plus_cell);
  return v;
}

double DGForms::laplace(const DiscreteField& phi, const DiscreteField& xi, double eta) const {
  check(phi);
  check(xi);
  double s = 0.0;
  for (std::size_t k = 0; k < space_->num_cells(); ++k) {
    s += xi.cell_coefficients(k).dot(stiffness_[k] * phi.cell_coefficients(k));
  }
  const auto& faces = space_->mesh().faces();
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    if (faces[fi].is_boundary) continue;
    const auto u = face_dofs(phi, fi);
    const auto v = face_dofs(xi, fi);
    s += v.dot((eta * penalty_[fi] + consistency_[fi]) * u);
  }
  return s;
}

double DGForms::swip(const MobilityCoefficients& mob, const DiscreteField& mu, const DiscreteField& psi,
                     double eta) const {
  check(mu);
  check(psi);
  double s = 0.0;
  for (std::size_t k = 0; k < space_->num_cells(); ++k) {
    if (mob.cell[k] == 0.0) continue;
    s += mob.cell[k] * psi.cell_coefficients(k).dot(stiffness_[k] * mu.cell_coefficients(k));
  }
  const auto& faces = space_->mesh().faces();
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    if (faces[fi].is_boundary || mob.face[fi] == 0.0) continue;
    const auto u = face_dofs(mu, fi);
    const auto v = face_dofs(psi, fi);
    s += mob.face[fi] * v.dot((eta * penalty_[fi] + consistency_[fi]) * u);
  }
  return s;
}

std::pair<double, double> DGForms::dg_seminorm_parts(const MobilityCoefficients& mob,
                                                     const DiscreteField& v) const {
  check(v);
  double vol = 0.0, jump = 0.0;
  for (std::size_t k = 0; k < space_->num_cells(); ++k) {
    if (mob.cell[k] == 0.0) continue;
    const auto c = v.cell_coefficients(k);
    vol += mob.cell[k] * c.dot(stiffness_[k] * c);
  }
  const auto& faces = space_->mesh().faces();
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    if (faces[fi].is_boundary || mob.face[fi] == 0.0) continue;
    const auto u = face_dofs(v, fi);
    jump += mob.face[fi] * u.dot(penalty_[fi] * u);
  }
  return {std::max(vol, 0.0), std::max(jump, 0.0)};
}

double DGForms::dg_seminorm_squared(const MobilityCoefficients& mob, const DiscreteField& v) const {
  const auto [vol, jump] = dg_seminorm_parts(mob, v);
  return vol + jump;
}

MobilityCoefficients DGForms::mobility_of(const DiscreteField& phi) const {
  check(phi);
  const auto& mesh = space_->mesh();
  MobilityCoefficients m;
  m.cell.resize(mesh.num_cells());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) m.cell[k] = mobility(phi(k, 0));
  m.face.assign(mesh.num_faces(), 0.0);
  for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& f = mesh.faces()[fi];
    if (f.is_boundary) continue;
    m.face[fi] = harmonic_average(m.cell[f.minus_cell], m.cell[f.plus_cell]);
  }
  return m;
}

MobilityCoefficients DGForms::unit_mobility() const {
  const auto& mesh = space_->mesh();
  MobilityCoefficients m;
  m.cell.assign(mesh.num_cells(), 1.0);
  m.face.assign(mesh.num_faces(), 0.0);
  for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
    if (!mesh.faces()[fi].is_boundary) m.face[fi] = 1.0;
  }
  return m;
}

BlockSparseMatrix DGForms::assemble_swip(const MobilityCoefficients& mob, double eta) const {
  const auto& mesh = space_->mesh();
  const auto n = idx(space_->dofs_per_cell());
  BlockSparseMatrix a(mesh, space_->dofs_per_cell());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) a.block(k, k) += mob.cell[k] * stiffness_[k];
  for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& f = mesh.faces()[fi];
    if (f.is_boundary || mob.face[fi] == 0.0) continue;
    const Eigen::MatrixXd m = mob.face[fi] * (eta * penalty_[fi] + consistency_[fi]);
    const std::size_t c[2] = {f.minus_cell, f.plus_cell};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) a.block(c[i], c[j]) += m.block(i * n, j * n, n, n);
    }
  }
  return a;
}

BlockSparseMatrix DGForms::assemble_laplace(double eta) const {
  return assemble_swip(unit_mobility(), eta);
}

// ---------------------------------------------------------------------------

UpwindAdvection::UpwindAdvection(std::shared_ptr<const DGSpace> space, VectorFunction velocity)
    : space_(std::move(space)) {
  const auto& mesh = space_->mesh();
  const auto& basis = space_->basis();
  const auto& vrule = basis.volume_rule();
  const auto& frule = basis.face_rule();
  const std::size_t n = basis.size();

  volume_.reserve(mesh.num_cells());
  for (const auto& cell : mesh.cells()) {
    const double det = std::abs(cell.jacobian.determinant());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(idx(n));
    for (std::size_t q = 0; q < vrule.size(); ++q) {
      const auto g = basis.gradients_at_quadrature()[q] * cell.inverse_jacobian;
      v.noalias() += (vrule.weights[q] * det) * (g * velocity(cell.map_to_physical(vrule.points[q])));
    }
    volume_.push_back(std::move(v));
  }

  upwind_.resize(mesh.num_faces());
  downwind_.resize(mesh.num_faces());
  for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& f = mesh.faces()[fi];
    if (f.is_boundary) continue;
    const Cell& cm = mesh.cell(f.minus_cell);
    const Cell& cp = mesh.cell(f.plus_cell);
    Eigen::VectorXd up = Eigen::VectorXd::Zero(idx(2 * n));
    Eigen::VectorXd down = Eigen::VectorXd::Zero(idx(2 * n));
    Eigen::VectorXd jump(idx(2 * n));
    for (std::size_t q = 0; q < frule.size(); ++q) {
      const Vec2 x = f.point(mesh.vertices(), frule.points[q].x());
      jump.head(idx(n)) = basis.values(cm.map_to_reference(x));
      jump.tail(idx(n)) = -basis.values(cp.map_to_reference(x));
      const double un = velocity(x).dot(f.unit_normal);
      const double w = frule.weights[q] * f.length;
      up += (w * std::max(un, 0.0)) * jump;
      down += (w * std::min(un, 0.0)) * jump;
    }
    upwind_[fi] = std::move(up);
    downwind_[fi] = std::move(down);
  }
}

Eigen::VectorXd UpwindAdvection::apply_all(const std::vector<double>& means) const {
  const auto& mesh = space_->mesh();
  const auto n = idx(space_->dofs_per_cell());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(idx(space_->num_dofs()));
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) out.segment(idx(k) * n, n) += means[k] * volume_[k];
  for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& f = mesh.faces()[fi];
    if (f.is_boundary) continue;
    const Eigen::VectorXd flux = upwind_[fi] * means[f.minus_cell] + downwind_[fi] * means[f.plus_cell];
    out.segment(idx(f.minus_cell) * n, n) -= flux.head(n);
    out.segment(idx(f.plus_cell) * n, n) -= flux.tail(n);
  }
  return out;
}

double UpwindAdvection::apply(const DiscreteField& phibar, const DiscreteField& psi) const {
  if (!psi.space().same_as(*space_)) throw std::invalid_argument("UpwindAdvection: space mismatch");
  if (phibar.space().num_cells() != space_->num_cells()) {
    throw std::invalid_argument("UpwindAdvection: phibar lives on another mesh");
  }
  std::vector<double> means(space_->num_cells());
  for (std::size_t k = 0; k < means.size(); ++k) means[k] = phibar(k, 0);
  return apply_all(means).dot(psi.coefficients());
}

BlockSparseMatrix UpwindAdvection::derivative() const {
  const auto& mesh = space_->mesh();
  const auto n = idx(space_->dofs_per_cell());
  BlockSparseMatrix d(mesh, space_->dofs_per_cell());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) d.block(k, k).col(0) += volume_[k];
  for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& f = mesh.faces()[fi];
    if (f.is_boundary) continue;
    d.block(f.minus_cell, f.minus_cell).col(0) -= upwind_[fi].head(n);
    d.block(f.plus_cell, f.minus_cell).col(0) -= upwind_[fi].tail(n);
    d.block(f.minus_cell, f.plus_cell).col(0) -= downwind_[fi].head(n);
    d.block(f.plus_cell, f.plus_cell).col(0) -= downwind_[fi].tail(n);
  }
  return d;
}

// ---------------------------------------------------------------------------

SwipdpScheme::SwipdpScheme(std::shared_ptr<const DGSpace> space, SchemeParams params,
                           std::optional<ScalarFunction> source, std::optional<VectorFunction> velocity)
    : forms_(space), params_(params) {
  params_.validate();
  if (params_.source_enabled && !source) {
    throw std::invalid_argument("SwipdpScheme: source enabled without a source function");
  }
  if (params_.advection_enabled && !velocity) {
    throw std::invalid_argument("SwipdpScheme: advection enabled without a velocity field");
  }
  source_load_ = Eigen::VectorXd::Zero(idx(space->num_dofs()));
  if (params_.source_enabled) {
    const auto& basis = space->basis();
    const auto rule = projection_rule(basis);
    const auto n = idx(basis.size());
    for (std::size_t k = 0; k < space->num_cells(); ++k) {
      const auto& cell = space->mesh().cell(k);
      const double det = std::abs(cell.jacobian.determinant());
      for (std::size_t q = 0; q < rule.size(); ++q) {
        source_load_.segment(idx(k) * n, n) +=
            (rule.weights[q] * det * (*source)(cell.map_to_physical(rule.points[q]))) *
            basis.values(rule.points[q]);
      }
    }
  }
  if (params_.advection_enabled) advection_.emplace(space, *velocity);
}

SwipdpScheme SwipdpScheme::with_tau(double tau) const {
  SwipdpScheme s(*this);
  s.params_.tau = tau;
  s.params_.validate();
  return s;
}

void SwipdpScheme::check(const DiscreteField& f) const {
  if (!f.space().same_as(space())) throw std::invalid_argument("SwipdpScheme: field from a different space");
}

Eigen::VectorXd SwipdpScheme::pack(const DiscreteField& phi, const DiscreteField& mu) const {
  check(phi);
  check(mu);
  const auto n = idx(space().dofs_per_cell());
  Eigen::VectorXd x(idx(num_unknowns()));
  for (std::size_t k = 0; k < space().num_cells(); ++k) {
    x.segment(2 * n * idx(k), n) = phi.cell_coefficients(k);
    x.segment(2 * n * idx(k) + n, n) = mu.cell_coefficients(k);
  }
  return x;
}

void SwipdpScheme::unpack(const Eigen::VectorXd& x, DiscreteField& phi, DiscreteField& mu) const {
  check(phi);
  check(mu);
  if (x.size() != idx(num_unknowns())) throw std::invalid_argument("SwipdpScheme::unpack: size mismatch");
  const auto n = idx(space().dofs_per_cell());
  for (std::size_t k = 0; k < space().num_cells(); ++k) {
    phi.cell_coefficients(k) = x.segment(2 * n * idx(k), n);
    mu.cell_coefficients(k) = x.segment(2 * n * idx(k) + n, n);
  }
}

Eigen::VectorXd SwipdpScheme::residual(const CoupledState& state_new, const DiscreteField& phi_old) const {
  return residual(pack(state_new.phi, state_new.mu), phi_old);
}

Eigen::VectorXd SwipdpScheme::residual(const Eigen::VectorXd& x, const DiscreteField& phi_old) const {
  check(phi_old);
  if (x.size() != idx(num_unknowns())) throw std::invalid_argument("SwipdpScheme::residual: size mismatch");
  const auto& mesh = space().mesh();
  const auto& basis = space().basis();
  const auto& vrule = basis.volume_rule();
  const auto& table = basis.values_at_quadrature();
  const auto n = idx(basis.size());
  const double inv_tau = 1.0 / params_.tau;
  const double inv_pe = 1.0 / params_.pe;
  const double cn2 = params_.cn * params_.cn;
  const Eigen::Map<const Eigen::VectorXd> w(vrule.weights.data(), idx(vrule.size()));

  auto phi_of = [&](std::size_t k) { return x.segment(2 * n * idx(k), n); };
  auto mu_of = [&](std::size_t k) { return x.segment(2 * n * idx(k) + n, n); };

  std::vector<double> means(mesh.num_cells());
  std::vector<double> mob(mesh.num_cells());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    means[k] = x[2 * n * idx(k)];
    mob[k] = mobility(means[k]);
  }

  Eigen::VectorXd r = Eigen::VectorXd::Zero(x.size());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Cell& cell = mesh.cell(k);
    const double area = cell.measure;
    const double det = std::abs(cell.jacobian.determinant());
    const auto c = phi_of(k);
    const auto d = mu_of(k);
    const auto c_old = phi_old.cell_coefficients(k);
    auto r_phi = r.segment(2 * n * idx(k), n);
    auto r_mu = r.segment(2 * n * idx(k) + n, n);

    r_phi = (inv_tau * area) * (c - c_old) - source_load_.segment(idx(k) * n, n);
    if (mob[k] != 0.0) r_phi.noalias() += (inv_pe * mob[k]) * (forms_.cell_stiffness(k) * d);

    const Eigen::VectorXd vals = table * c;
    const Eigen::VectorXd cubic = (w.array() * vals.array().cube()).matrix();
    r_mu = area * (d + c_old) - det * (table.transpose() * cubic) - cn2 * (forms_.cell_stiffness(k) * c);
  }

  const auto& faces = mesh.faces();
  Eigen::VectorXd cs(2 * n), ds(2 * n);
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    const Face& f = faces[fi];
    if (f.is_boundary) continue;
    const std::size_t km = f.minus_cell, kp = f.plus_cell;
    cs << phi_of(km), phi_of(kp);
    const Eigen::VectorXd lap =
        (params_.eta_laplace * forms_.face_penalty(fi) + forms_.face_consistency(fi)) * cs;
    r.segment(2 * n * idx(km) + n, n) -= cn2 * lap.head(n);
    r.segment(2 * n * idx(kp) + n, n) -= cn2 * lap.tail(n);

    const double h = harmonic_average(mob[km], mob[kp]);
    if (h == 0.0) continue;
    ds << mu_of(km), mu_of(kp);
    const Eigen::VectorXd b =
        (inv_pe * h) * ((params_.eta * forms_.face_penalty(fi) + forms_.face_consistency(fi)) * ds);
    r.segment(2 * n * idx(km), n) += b.head(n);
    r.segment(2 * n * idx(kp), n) += b.tail(n);
  }

  if (advection_) {
    // The upwind form enters with a minus sign: d_t phi + div(u phi) = ...
    const Eigen::VectorXd c = advection_->apply_all(means);
    for (std::size_t k = 0; k < mesh.num_cells(); ++k) r.segment(2 * n * idx(k), n) -= c.segment(idx(k) * n, n);
  }
  if (params_.time_scaled) {
    for (std::size_t k = 0; k < mesh.num_cells(); ++k) r.segment(2 * n * idx(k), n) *= params_.tau;
  }
  return r;
}

BlockSparseMatrix SwipdpScheme::jacobian(const CoupledState& state_new, const DiscreteField& phi_old) const {
  return jacobian(pack(state_new.phi, state_new.mu), phi_old);
}

BlockSparseMatrix SwipdpScheme::jacobian(const Eigen::VectorXd& x, const DiscreteField& phi_old) const {
  check(phi_old);
  if (x.size() != idx(num_unknowns())) throw std::invalid_argument("SwipdpScheme::jacobian: size mismatch");
  const auto& mesh = space().mesh();
  const auto& basis = space().basis();
  const auto& vrule = basis.volume_rule();
  const auto& table = basis.values_at_quadrature();
  const auto n = idx(basis.size());
  const double inv_tau = 1.0 / params_.tau;
  const double inv_pe = 1.0 / params_.pe;
  const double cn2 = params_.cn * params_.cn;
  const Eigen::Map<const Eigen::VectorXd> w(vrule.weights.data(), idx(vrule.size()));

  auto phi_of = [&](std::size_t k) { return x.segment(2 * n * idx(k), n); };
  auto mu_of = [&](std::size_t k) { return x.segment(2 * n * idx(k) + n, n); };

  std::vector<double> mob(mesh.num_cells()), dmob(mesh.num_cells());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const double s = x[2 * n * idx(k)];
    mob[k] = mobility(s);
    dmob[k] = mobility_derivative(s);
  }

  BlockSparseMatrix jac(mesh, 2 * basis.size());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Cell& cell = mesh.cell(k);
    const double area = cell.measure;
    const double det = std::abs(cell.jacobian.determinant());
    const auto& stiff = forms_.cell_stiffness(k);
    auto blk = jac.block(k, k);

    blk.topLeftCorner(n, n).diagonal().array() += inv_tau * area;
    blk.topRightCorner(n, n) += (inv_pe * mob[k]) * stiff;
    if (dmob[k] != 0.0) blk.topLeftCorner(n, n).col(0) += (inv_pe * dmob[k]) * (stiff * mu_of(k));

    const Eigen::VectorXd vals = table * phi_of(k);
    const Eigen::VectorXd weight = (3.0 * det) * (w.array() * vals.array().square()).matrix();
    blk.bottomLeftCorner(n, n) -= table.transpose() * weight.asDiagonal() * table + cn2 * stiff;
    blk.bottomRightCorner(n, n).diagonal().array() += area;
  }

  const auto& faces = mesh.faces();
  Eigen::VectorXd ds(2 * n);
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    const Face& f = faces[fi];
    if (f.is_boundary) continue;
    const std::size_t c[2] = {f.minus_cell, f.plus_cell};
    const Eigen::MatrixXd lap = params_.eta_laplace * forms_.face_penalty(fi) + forms_.face_consistency(fi);
    const Eigen::MatrixXd swip = params_.eta * forms_.face_penalty(fi) + forms_.face_consistency(fi);
    const double h = harmonic_average(mob[c[0]], mob[c[1]]);
    ds << mu_of(c[0]), mu_of(c[1]);
    const Eigen::VectorXd g = inv_pe * (swip * ds);
    const double dh[2] = {harmonic_average_derivative(mob[c[0]], mob[c[1]]) * dmob[c[0]],
                          harmonic_average_derivative(mob[c[1]], mob[c[0]]) * dmob[c[1]]};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        auto blk = jac.block(c[a], c[b]);
        blk.bottomLeftCorner(n, n) -= cn2 * lap.block(a * n, b * n, n, n);
        if (h != 0.0) blk.topRightCorner(n, n) += (inv_pe * h) * swip.block(a * n, b * n, n, n);
        // Mobility depends on the mean of cell b through <<M>>.
        if (dh[b] != 0.0) blk.col(0).head(n) += dh[b] * g.segment(a * n, n);
      }
    }
  }

  if (advection_) {
    const auto d = advection_->derivative();
    for (std::size_t row = 0; row < mesh.num_cells(); ++row) {
      for (std::size_t e = d.row_ptr()[row]; e < d.row_ptr()[row + 1]; ++e) {
        jac.block(row, d.block_cols()[e]).col(0).head(n) -= d.block_at(e).col(0);
      }
    }
  }
  if (params_.time_scaled) {
    for (std::size_t e = 0; e < jac.num_blocks(); ++e) jac.block_at(e).topRows(n) *= params_.tau;
  }
  return jac;
}

}  // namespace chdg
