#include "tsgd/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tsgd {

void ProblemConstants::validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument(std::string("ProblemConstants: ") + name +
                                  " must be finite and nonnegative");
    }
  };
  check(mu, "mu");
  check(mu2, "mu2");
  check(lip, "lip");
  check(lip4, "lip4");
  check(sigma, "sigma");
  check(sigma4, "sigma4");
  check(reg, "reg");
  if (grad_bound) check(*grad_bound, "grad_bound");
  if (noise_ratio) check(*noise_ratio, "noise_ratio");
  // Moment orderings implied by Jensen's inequality.
  const double tol = 1e-12;
  if (mu > lip * (1.0 + tol) + tol) {
    throw std::invalid_argument("ProblemConstants: mu must not exceed lip");
  }
  if (mu > mu2 * (1.0 + tol) + tol) {
    throw std::invalid_argument("ProblemConstants: mu must not exceed mu2");
  }
  if (lip > lip4 * (1.0 + tol) + tol) {
    throw std::invalid_argument("ProblemConstants: lip must not exceed lip4");
  }
  if (sigma > sigma4 * (1.0 + tol) + tol) {
    throw std::invalid_argument("ProblemConstants: sigma must not exceed sigma4");
  }
}

Draw StochasticGradientOracle::sample_draw(RngStream&) const {
  throw std::logic_error(
      "sample_draw: finite-sum problems draw batches through an EpochBatcher");
}

double finite_sum_gradient_identity(const StochasticGradientOracle& oracle, const ParamVector& w,
                                    std::span<const std::vector<std::size_t>> partition) {
  // For finite-sum oracles the partition must cover every sample index
  // exactly once. Deterministic oracles (sample_count() == 0) ignore batch
  // indices, so any non-empty partition is admissible there.
  const std::size_t n = oracle.sample_count();
  if (w.size() != oracle.dimension()) {
    throw std::invalid_argument("finite_sum_gradient_identity: dimension mismatch");
  }
  if (partition.empty()) {
    throw std::invalid_argument("finite_sum_gradient_identity: empty partition");
  }
  std::vector<char> seen(n, 0);
  std::size_t covered = 0;
  for (const auto& batch : partition) {
    if (batch.empty()) {
      throw std::invalid_argument("finite_sum_gradient_identity: empty batch in partition");
    }
    for (std::size_t idx : batch) {
      ++covered;
      if (n == 0) continue;
      if (idx >= n) {
        throw std::invalid_argument("finite_sum_gradient_identity: index out of range");
      }
      if (seen[idx]) {
        throw std::invalid_argument("finite_sum_gradient_identity: index repeated in partition");
      }
      seen[idx] = 1;
    }
  }
  if (n != 0 && covered != n) {
    throw std::invalid_argument("finite_sum_gradient_identity: partition does not cover all samples");
  }

  // Size-weighted mean of the batch gradients; exact for any partition since
  // each batch gradient is the plain mean over its indices.
  ParamVector weighted(w.size(), 0.0);
  Draw draw;
  for (const auto& batch : partition) {
    draw.batch = batch;
    const ParamVector g = oracle.gradient_at(draw, w);
    const double weight = static_cast<double>(batch.size()) / static_cast<double>(covered);
    for (std::size_t i = 0; i < weighted.size(); ++i) weighted[i] += weight * g[i];
  }

  const ParamVector full = oracle.full_gradient(w);
  double worst = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i) {
    worst = std::max(worst, std::abs(weighted[i] - full[i]));
  }
  return worst;
}

}  // namespace tsgd
