#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tsgd/rng.hpp"
#include "tsgd/vec.hpp"

namespace tsgd {

// One realization of the randomness entering a stochastic gradient.
// Finite-sum problems fill `batch` (sample indices); additive-noise problems
// fill `noise`.
struct Draw {
  std::vector<std::size_t> batch;
  std::vector<double> noise;
};

// Constants describing a problem under the standing regularity assumptions:
// mu     expected strong-convexity modulus,
// mu2    second-moment modulus (>= mu),
// lip    mean-square Lipschitz constant of the gradients,
// lip4   fourth-moment Lipschitz constant (>= lip),
// sigma  root mean square gradient norm at the minimizer,
// sigma4 fourth-root fourth moment of the same (>= sigma),
// grad_bound  almost-sure bound on the stochastic gradient magnitude, when one exists,
// noise_ratio bound on the noise ratio at the reference point, when one exists.
struct ProblemConstants {
  double mu = 0.0;
  double mu2 = 0.0;
  double lip = 0.0;
  double lip4 = 0.0;
  double sigma = 0.0;
  double sigma4 = 0.0;
  std::optional<double> grad_bound;
  std::optional<double> noise_ratio;
  double reg = 0.0;

  void validate() const;
};

// A stochastic objective F(w) = E[f(xi, w)] presented through per-draw
// gradients. gradient_at must be deterministic given (draw, w).
class StochasticGradientOracle {
 public:
  virtual ~StochasticGradientOracle() = default;

  virtual std::size_t dimension() const = 0;

  // Stochastic gradient for one draw.
  virtual ParamVector gradient_at(const Draw& draw, const ParamVector& w) const = 0;

  // Exact gradient of F.
  virtual ParamVector full_gradient(const ParamVector& w) const = 0;

  // F(w), including any regularization term.
  virtual double objective(const ParamVector& w) const = 0;

  // Number of samples for finite-sum problems; 0 means draws are sampled
  // noise and the problem has no dataset.
  virtual std::size_t sample_count() const { return 0; }

  // Configured mini-batch size (finite-sum problems only).
  virtual std::size_t batch_size() const { return 0; }

  // Produces a noise draw. Finite-sum problems do not implement this; their
  // draws come from an epoch batcher.
  virtual Draw sample_draw(RngStream& rng) const;

  // Strong-convexity modulus of F when known (0 otherwise). Used to pick a
  // default step schedule for reference runs.
  virtual double strong_convexity() const { return 0.0; }
};

// Largest absolute discrepancy between the exact full gradient and the
// size-weighted mean of per-batch gradients over a partition of the sample
// set. Exact (up to rounding) for any finite-sum problem and any partition.
double finite_sum_gradient_identity(const StochasticGradientOracle& oracle,
                                    const ParamVector& w,
                                    std::span<const std::vector<std::size_t>> partition);

}  // namespace tsgd
