#pragma once

#include "chdg/forms.hpp"
#include "chdg/limiter.hpp"
#include "chdg/newton.hpp"

#include <memory>

namespace chdg {

struct StepperConfig {
  NewtonConfig newton;
  bool limiter_enabled = false;
  /// Clip Newton iterates' cell averages to [-1, 1], and hold an average at
  /// the bound once it has been clipped twice in one solve. Near a pure phase
  /// the step equation can lack a root with |average| < 1; Newton then
  /// cycles across the mobility kink instead of settling at the bound.
  /// If that solve fails, Newton restarts from the old state with the clipped
  /// averages moved restart_shift inside the bound.
  /// Ignored when a source term is active.
  bool project_averages = true;
  double restart_shift = 1e-6;
  /// When Newton still fails, rebuild the guess from solves with tau / 2^j,
  /// j = level..1, for level = 1..continuation_levels.
  int continuation_levels = 3;
  LimiterConfig limiter;
};

struct StepInfo {
  NewtonReport newton;
  LimitReport limit;
  int continuation = 0;  // tau-continuation level used for the guess, 0 if none
};

/// Advances a CoupledState by one SWIPDP step, limiting phi afterwards when
/// enabled (SWIPDP-L).
class Stepper {
 public:
  Stepper(std::shared_ptr<const SwipdpScheme> scheme, StepperConfig cfg);

  const SwipdpScheme& scheme() const { return *scheme_; }
  const StepperConfig& config() const { return cfg_; }

  /// Newton guess is the previous state. Throws NewtonError; state is left
  /// untouched in that case.
  StepInfo advance(CoupledState& state);

  /// Limits phi in place if the limiter is enabled and p > 0.
  LimitReport limit(CoupledState& state) const;

 private:
  std::shared_ptr<const SwipdpScheme> scheme_;
  StepperConfig cfg_;
  LinearSolver linear_;

  NewtonReport solve(const SwipdpScheme& s, const DiscreteField& phi_old, Eigen::VectorXd& x);
};

}  // namespace chdg
