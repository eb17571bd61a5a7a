#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>

#include "tsgd/schedule.hpp"
#include "tsgd/vec.hpp"

namespace tsgd {

// Fraction of the raw step alpha*||g|| that the tamed update realizes:
// t/(1+t) with t = alpha*||g||. Sandwiched between min{1,t}/2 and min{1,t},
// and always strictly below 1, so a single tamed step moves less than one
// unit no matter how large the gradient is.
inline double taming_factor(double alpha, double grad_norm) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("taming_factor: alpha must be positive and finite");
  }
  if (!(grad_norm >= 0.0) || !std::isfinite(grad_norm)) {
    throw std::invalid_argument("taming_factor: grad_norm must be nonnegative and finite");
  }
  const double t = alpha * grad_norm;
  if (t < 1.0) return t / (1.0 + t);
  // For large t, 1 + t rounds to t and the direct quotient saturates at 1;
  // the complement form 1 - 1/(1+t) stays accurate there (and would cancel
  // catastrophically for small t, hence the split). Clamping keeps the
  // strict < 1 contract even when 1/(1+t) underflows below half an ulp.
  return std::min(1.0 - 1.0 / (1.0 + t), 1.0 - 0x1.0p-53);
}

namespace detail {

// w <- w - alpha * g / (1 + alpha * norm_at_z). Shared by the plain tamed
// step (norm_at_z = ||g||) and the frozen-denominator map, so the two agree
// bitwise when fed the same norm.
inline void tamed_update(ParamVector& w, const ParamVector& g, double alpha, double norm_at_z) {
  const double denom = 1.0 + alpha * norm_at_z;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] -= (alpha * g[i]) / denom;
  }
}

}  // namespace detail

// Optimizer state: current iterate w^n and the 1-based step counter n.
struct OptimizerState {
  ParamVector iterate;
  std::uint64_t step_index = 1;
  StepSchedule schedule;
};

// Tamed stochastic gradient step:
//   w^{n+1} = w^n - alpha_n g / (1 + alpha_n ||g||).
inline OptimizerState tsgd_step(const OptimizerState& state, const ParamVector& gradient) {
  require_same_size(state.iterate, gradient, "tsgd_step");
  require_finite(gradient, "tsgd_step gradient");
  const double alpha = schedule_value(state.schedule, state.step_index);
  OptimizerState next{state.iterate, state.step_index + 1, state.schedule};
  detail::tamed_update(next.iterate, gradient, alpha, vec_norm(gradient));
  return next;
}

// Plain stochastic gradient step: w^{n+1} = w^n - alpha_n g.
inline OptimizerState sgd_step(const OptimizerState& state, const ParamVector& gradient) {
  require_same_size(state.iterate, gradient, "sgd_step");
  require_finite(gradient, "sgd_step gradient");
  const double alpha = schedule_value(state.schedule, state.step_index);
  OptimizerState next{state.iterate, state.step_index + 1, state.schedule};
  for (std::size_t i = 0; i < next.iterate.size(); ++i) {
    next.iterate[i] -= alpha * gradient[i];
  }
  return next;
}

// Splits the tamed increment into the plain gradient step and the
// second-order remainder:
//   alpha g / (1 + alpha||g||) = alpha g - alpha^2 ||g|| g / (1 + alpha||g||).
// Returns (alpha*g, remainder); the remainder norm is at most alpha^2||g||^2.
inline std::pair<ParamVector, ParamVector> perturbation_decomposition(double alpha,
                                                                      const ParamVector& gradient) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("perturbation_decomposition: alpha must be positive and finite");
  }
  require_finite(gradient, "perturbation_decomposition gradient");
  const double gnorm = vec_norm(gradient);
  const double denom = 1.0 + alpha * gnorm;
  ParamVector first(gradient.size());
  ParamVector second(gradient.size());
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    first[i] = alpha * gradient[i];
    second[i] = (alpha * alpha * gnorm * gradient[i]) / denom;
  }
  return {std::move(first), std::move(second)};
}

}  // namespace tsgd
