#include "chdg/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace chdg {

Stepper::Stepper(std::shared_ptr<const SwipdpScheme> scheme, StepperConfig cfg)
    : scheme_(std::move(scheme)), cfg_(cfg), linear_(cfg.newton.linear) {
  if (!scheme_) throw std::invalid_argument("Stepper: null scheme");
  cfg_.limiter.validate();
}

LimitReport Stepper::limit(CoupledState& state) const {
  LimitReport rep;
  if (cfg_.limiter_enabled && state.phi.space().order() > 0) {
    state.phi = limit_field(state.phi, cfg_.limiter, &rep);
  }
  return rep;
}

NewtonReport Stepper::solve(const SwipdpScheme& s, const DiscreteField& phi_old, Eigen::VectorXd& x) {
  NewtonReport report;
  auto residual = [&](const Eigen::VectorXd& y) { return s.residual(y, phi_old); };
  auto jacobian = [&](const Eigen::VectorXd& y) { return s.jacobian(y, phi_old); };
  if (!cfg_.project_averages || s.params().source_enabled) {
    report = newton_solve(residual, jacobian, x, cfg_.newton, linear_);
  } else {
    const auto n = static_cast<Eigen::Index>(s.space().dofs_per_cell());
    const Eigen::VectorXd x0 = x;
    std::vector<int> clipped(s.space().num_cells(), 0);
    NewtonConfig ncfg = cfg_.newton;
    ncfg.project = [&clipped, n](Eigen::VectorXd& y) {
      for (std::size_t k = 0; k < clipped.size(); ++k) {
        double& v = y[static_cast<Eigen::Index>(2 * n * k)];
        if (std::abs(v) > 1.0) {
          v = std::clamp(v, -1.0, 1.0);
          ++clipped[k];
        }
      }
    };
    // A cell clipped twice sits on the bound: hold its average there.
    ncfg.constrain = [&clipped, n](const Eigen::VectorXd& y, BlockSparseMatrix& jac, Eigen::VectorXd& rhs) {
      const auto& ptr = jac.row_ptr();
      for (std::size_t k = 0; k < clipped.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(2 * n * k);
        if (clipped[k] < 2 || std::abs(y[i]) != 1.0) continue;
        for (auto e = ptr[k]; e < ptr[k + 1]; ++e) jac.block_at(e).row(0).setZero();
        jac.block(k, k)(0, 0) = 1.0;
        rhs[i] = 0.0;
      }
    };
    try {
      report = newton_solve(residual, jacobian, x, ncfg, linear_);
    } catch (const NewtonError&) {
      // The held value may not be a root; the root can lie slightly inside.
      // Restart with clipped cells nudged off the bound and mirrored projection.
      x = x0;
      bool any = false;
      for (std::size_t k = 0; k < clipped.size(); ++k) {
        if (clipped[k] == 0) continue;
        const auto i = static_cast<Eigen::Index>(2 * n * k);
        x[i] = std::copysign(std::min(std::abs(x[i]), 1.0 - cfg_.restart_shift), x[i]);
        any = true;
      }
      if (!any) throw;
      NewtonConfig rcfg = cfg_.newton;
      rcfg.project = [n](Eigen::VectorXd& y) {
        for (Eigen::Index i = 0; i < y.size(); i += 2 * n) {
          if (y[i] > 1.0) y[i] = std::max(2.0 - y[i], 0.0);
          if (y[i] < -1.0) y[i] = std::min(-2.0 - y[i], 0.0);
        }
      };
      report = newton_solve(residual, jacobian, x, rcfg, linear_);
    }
  }
  return report;
}

StepInfo Stepper::advance(CoupledState& state) {
  const SwipdpScheme& s = *scheme_;
  const DiscreteField& phi_old = state.phi;
  const Eigen::VectorXd x0 = s.pack(state.phi, state.mu);
  Eigen::VectorXd x = x0;
  StepInfo info;
  try {
    info.newton = solve(s, phi_old, x);
  } catch (const NewtonError&) {
    // Continuation in tau: the root for tau / 2^j seeds the one for tau / 2^(j-1).
    bool done = false;
    for (int level = 1; level <= cfg_.continuation_levels && !done; ++level) {
      x = x0;
      try {
        for (int j = level; j >= 1; --j) solve(s.with_tau(std::ldexp(s.params().tau, -j)), phi_old, x);
        info.newton = solve(s, phi_old, x);
        info.continuation = level;
        done = true;
      } catch (const NewtonError&) {
      }
    }
    if (!done) throw;
  }
  DiscreteField phi(state.phi.space_ptr()), mu(state.mu.space_ptr());
  s.unpack(x, phi, mu);
  state.phi = std::move(phi);
  state.mu = std::move(mu);
  state.time += s.params().tau;
  state.step += 1;
  info.limit = limit(state);
  return info;
}

}  // namespace chdg
