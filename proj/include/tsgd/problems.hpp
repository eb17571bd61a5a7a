#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tsgd/dataset.hpp"
#include "tsgd/oracle.hpp"

namespace tsgd {

// Diagonal quadratic F(w) = (1/2)(w - w*)^T A (w - w*) with additive noise
// on the gradient: g(draw, w) = A(w - w*) + noise_sigma * eta. Gaussian eta
// has iid standard-normal coordinates; bounded_uniform has iid U[-1,1]
// coordinates (so ||eta|| <= sqrt(d) almost surely).
class QuadraticProblem final : public StochasticGradientOracle {
 public:
  enum class NoiseKind { gaussian, bounded_uniform };

  QuadraticProblem(std::vector<double> matrix_diag, ParamVector target,
                   double noise_sigma = 0.0, NoiseKind noise_kind = NoiseKind::gaussian);

  std::size_t dimension() const override { return diag_.size(); }
  ParamVector gradient_at(const Draw& draw, const ParamVector& w) const override;
  ParamVector full_gradient(const ParamVector& w) const override;
  double objective(const ParamVector& w) const override;
  Draw sample_draw(RngStream& rng) const override;
  double strong_convexity() const override;

  const std::vector<double>& matrix_diag() const { return diag_; }
  const ParamVector& minimizer() const { return target_; }
  double minimum_value() const { return 0.0; }
  double noise_sigma() const { return noise_sigma_; }
  NoiseKind noise_kind() const { return noise_kind_; }

 private:
  std::vector<double> diag_;
  ParamVector target_;
  double noise_sigma_;
  NoiseKind noise_kind_;
};

// Exact regularity constants of a diagonal quadratic with additive noise.
ProblemConstants quadratic_constants(const QuadraticProblem& p);

// Regularized logistic regression on a sparse dataset. The parameter vector
// is (weights, bias) when with_bias is set, weights only otherwise. With
// labels y in {-1,+1} and score h = <weights, x> + bias, the per-sample loss
// is ln(1 + exp(-h y)); the objective adds (reg/2)||w||^2 over the whole
// parameter vector, making F reg-strongly convex.
class LogisticProblem final : public StochasticGradientOracle {
 public:
  LogisticProblem(SparseDataset data, double reg, std::size_t batch_size = 0,
                  bool with_bias = true);

  std::size_t dimension() const override;
  ParamVector gradient_at(const Draw& draw, const ParamVector& w) const override;
  ParamVector full_gradient(const ParamVector& w) const override;
  double objective(const ParamVector& w) const override;
  std::size_t sample_count() const override { return data_.n_samples(); }
  std::size_t batch_size() const override { return batch_size_; }
  double strong_convexity() const override { return reg_; }

  // Mean loss over the batch plus regularization, and its gradient.
  std::pair<double, ParamVector> value_and_gradient(std::span<const std::size_t> batch,
                                                    const ParamVector& w) const;

  // Smoothness upper bound (1/4) max_i ||x_i~||^2 + reg, where x~ is the
  // per-sample feature vector as the model sees it (bias input included).
  double lipschitz_bound() const;

  // Constants with sigma/sigma4 estimated from one epoch partition of batch
  // gradients at the given reference point.
  ProblemConstants constants(const ParamVector& reference) const;

  double reg() const { return reg_; }
  bool with_bias() const { return with_bias_; }
  const SparseDataset& data() const { return data_; }

 private:
  SparseDataset data_;
  double reg_;
  std::size_t batch_size_;
  bool with_bias_;
};

std::pair<double, ParamVector> logistic_value_and_gradient(const LogisticProblem& p,
                                                           std::span<const std::size_t> batch,
                                                           const ParamVector& w);

// One-hidden-layer perceptron scoring head for binary classification:
// score = W2 relu(W1 x + b1) + b2, loss ln(1 + exp(-score y)) on the raw
// score, ridge term (reg/2)||w||^2 over all parameters. Parameters are
// flattened as [W1 row-major | b1 | W2 | b2]. relu'(0) is taken as 0.
class MlpProblem final : public StochasticGradientOracle {
 public:
  MlpProblem(SparseDataset data, std::size_t hidden_width, double reg,
             std::size_t batch_size = 0);

  std::size_t dimension() const override;
  ParamVector gradient_at(const Draw& draw, const ParamVector& w) const override;
  ParamVector full_gradient(const ParamVector& w) const override;
  double objective(const ParamVector& w) const override;
  std::size_t sample_count() const override { return data_.n_samples(); }
  std::size_t batch_size() const override { return batch_size_; }
  double strong_convexity() const override { return reg_; }

  std::pair<double, ParamVector> value_and_gradient(std::span<const std::size_t> batch,
                                                    const ParamVector& w) const;

  std::size_t hidden_width() const { return width_; }
  double reg() const { return reg_; }
  const SparseDataset& data() const { return data_; }

 private:
  SparseDataset data_;
  std::size_t width_;
  double reg_;
  std::size_t batch_size_;
};

std::pair<double, ParamVector> mlp_value_and_gradient(const MlpProblem& p,
                                                      std::span<const std::size_t> batch,
                                                      const ParamVector& w);

struct ReferenceSolution {
  ParamVector w;
  double f = 0.0;
};

// Reference minimizer for a problem. Quadratics are exact; finite-sum
// problems run a long tamed-step pass with the harmonic schedule
// theta = 2/strong_convexity, gamma = 1, tracking the lowest objective seen.
// Throws when the objective is still clearly improving at the end of the
// budget.
ReferenceSolution reference_solution(const StochasticGradientOracle& p, std::uint64_t budget,
                                     std::uint64_t seed);

}  // namespace tsgd
