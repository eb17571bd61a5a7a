#include "tsgd/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tsgd/batcher.hpp"
#include "tsgd/steps.hpp"

namespace tsgd {

namespace {

// ln(1 + exp(z)) without overflow for large |z|.
double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

// 1 / (1 + exp(-z)) evaluated from the bounded exponential.
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void require_batch(std::span<const std::size_t> batch, std::size_t n_samples) {
  if (batch.empty()) throw std::invalid_argument("batch must be non-empty");
  for (std::size_t idx : batch) {
    if (idx >= n_samples) throw std::invalid_argument("batch index out of range");
  }
}

std::size_t resolve_batch_size(std::size_t requested, std::size_t n_samples) {
  const std::size_t b = requested == 0 ? default_batch_size(n_samples) : requested;
  if (b > n_samples) {
    throw std::invalid_argument("batch size exceeds the number of samples");
  }
  return b;
}

double norm_sq(const ParamVector& v) {
  const double n = vec_norm(v);
  return n * n;
}

}  // namespace

QuadraticProblem::QuadraticProblem(std::vector<double> matrix_diag, ParamVector target,
                                   double noise_sigma, NoiseKind noise_kind)
    : diag_(std::move(matrix_diag)),
      target_(std::move(target)),
      noise_sigma_(noise_sigma),
      noise_kind_(noise_kind) {
  if (diag_.empty()) throw std::invalid_argument("QuadraticProblem: empty diagonal");
  for (double d : diag_) {
    if (!std::isfinite(d) || d <= 0.0) {
      throw std::invalid_argument("QuadraticProblem: diagonal entries must be positive");
    }
  }
  if (target_.size() != diag_.size()) {
    throw std::invalid_argument("QuadraticProblem: target dimension mismatch");
  }
  require_finite(target_, "QuadraticProblem target");
  if (!std::isfinite(noise_sigma_) || noise_sigma_ < 0.0) {
    throw std::invalid_argument("QuadraticProblem: noise sigma must be nonnegative");
  }
}

ParamVector QuadraticProblem::gradient_at(const Draw& draw, const ParamVector& w) const {
  require_same_size(w, target_, "QuadraticProblem::gradient_at");
  ParamVector g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    g[i] = diag_[i] * (w[i] - target_[i]);
  }
  if (noise_sigma_ > 0.0) {
    if (draw.noise.size() != w.size()) {
      throw std::invalid_argument("QuadraticProblem: draw noise dimension mismatch");
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      g[i] += noise_sigma_ * draw.noise[i];
    }
  }
  return g;
}

ParamVector QuadraticProblem::full_gradient(const ParamVector& w) const {
  require_same_size(w, target_, "QuadraticProblem::full_gradient");
  ParamVector g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    g[i] = diag_[i] * (w[i] - target_[i]);
  }
  return g;
}

double QuadraticProblem::objective(const ParamVector& w) const {
  require_same_size(w, target_, "QuadraticProblem::objective");
  double f = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double e = w[i] - target_[i];
    f += 0.5 * diag_[i] * e * e;
  }
  return f;
}

Draw QuadraticProblem::sample_draw(RngStream& rng) const {
  Draw d;
  if (noise_sigma_ > 0.0) {
    d.noise.resize(diag_.size());
    if (noise_kind_ == NoiseKind::gaussian) {
      for (double& x : d.noise) x = rng.next_gaussian();
    } else {
      for (double& x : d.noise) x = rng.next_symmetric();
    }
  }
  return d;
}

double QuadraticProblem::strong_convexity() const {
  return *std::min_element(diag_.begin(), diag_.end());
}

ProblemConstants quadratic_constants(const QuadraticProblem& p) {
  const auto& diag = p.matrix_diag();
  const double d = static_cast<double>(diag.size());
  const double s = p.noise_sigma();

  ProblemConstants c;
  c.mu = *std::min_element(diag.begin(), diag.end());
  c.lip = *std::max_element(diag.begin(), diag.end());
  // The per-draw gradient differs from the mean field by pure additive
  // noise, so the per-draw convexity and Lipschitz moduli are deterministic.
  c.mu2 = c.mu;
  c.lip4 = c.lip;
  if (p.noise_kind() == QuadraticProblem::NoiseKind::gaussian) {
    // E||eta||^2 = d, E||eta||^4 = d^2 + 2d for iid standard normals.
    c.sigma = s * std::sqrt(d);
    c.sigma4 = s * std::pow(d * d + 2.0 * d, 0.25);
    if (s == 0.0) {
      c.grad_bound = 0.0;
      c.noise_ratio = 0.0;
    }
  } else {
    // iid U[-1,1]: E||eta||^2 = d/3, E||eta||^4 = d/5 + d(d-1)/9,
    // ||eta|| <= sqrt(d) almost surely.
    c.sigma = s * std::sqrt(d / 3.0);
    c.sigma4 = s * std::pow(d / 5.0 + d * (d - 1.0) / 9.0, 0.25);
    c.grad_bound = s * std::sqrt(d);
    // Noise ratio at the reference point w*: the gradient there is pure
    // noise, so the ratio is exactly 1 whenever noise is present.
    c.noise_ratio = s > 0.0 ? 1.0 : 0.0;
  }
  c.validate();
  return c;
}

LogisticProblem::LogisticProblem(SparseDataset data, double reg, std::size_t batch_size,
                                 bool with_bias)
    : data_(std::move(data)), reg_(reg), with_bias_(with_bias) {
  if (data_.n_samples() == 0) throw std::invalid_argument("LogisticProblem: empty dataset");
  if (!std::isfinite(reg_) || reg_ < 0.0) {
    throw std::invalid_argument("LogisticProblem: reg must be nonnegative");
  }
  batch_size_ = resolve_batch_size(batch_size, data_.n_samples());
}

std::size_t LogisticProblem::dimension() const {
  return data_.n_features + (with_bias_ ? 1 : 0);
}

std::pair<double, ParamVector> LogisticProblem::value_and_gradient(
    std::span<const std::size_t> batch, const ParamVector& w) const {
  require_batch(batch, data_.n_samples());
  if (w.size() != dimension()) {
    throw std::invalid_argument("LogisticProblem: parameter dimension mismatch");
  }
  require_finite(w, "LogisticProblem parameters");

  const std::size_t nf = data_.n_features;
  double loss = 0.0;
  ParamVector grad(w.size(), 0.0);
  for (std::size_t idx : batch) {
    const double y = data_.labels[idx];
    double h = with_bias_ ? w[nf] : 0.0;
    for (const auto& [j, v] : data_.rows[idx]) h += w[j] * v;
    const double z = -h * y;
    loss += softplus(z);
    const double coeff = -y * sigmoid(z);
    for (const auto& [j, v] : data_.rows[idx]) grad[j] += coeff * v;
    if (with_bias_) grad[nf] += coeff;
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  loss *= inv;
  for (double& g : grad) g *= inv;
  if (reg_ > 0.0) {
    loss += 0.5 * reg_ * norm_sq(w);
    for (std::size_t i = 0; i < w.size(); ++i) grad[i] += reg_ * w[i];
  }
  return {loss, std::move(grad)};
}

ParamVector LogisticProblem::gradient_at(const Draw& draw, const ParamVector& w) const {
  return value_and_gradient(draw.batch, w).second;
}

namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace

ParamVector LogisticProblem::full_gradient(const ParamVector& w) const {
  return value_and_gradient(all_indices(data_.n_samples()), w).second;
}

double LogisticProblem::objective(const ParamVector& w) const {
  return value_and_gradient(all_indices(data_.n_samples()), w).first;
}

double LogisticProblem::lipschitz_bound() const {
  double max_sq = 0.0;
  for (const auto& row : data_.rows) {
    double sq = with_bias_ ? 1.0 : 0.0;
    for (const auto& [j, v] : row) sq += v * v;
    max_sq = std::max(max_sq, sq);
  }
  return 0.25 * max_sq + reg_;
}

ProblemConstants LogisticProblem::constants(const ParamVector& reference) const {
  ProblemConstants c;
  c.mu = reg_;
  c.mu2 = reg_;  // every batch loss carries the same ridge term
  c.lip = lipschitz_bound();
  c.lip4 = c.lip;
  c.reg = reg_;

  // Per-batch gradient moments at the reference point, over one shuffled
  // epoch partition.
  EpochBatcher batcher(data_.n_samples(), batch_size_, RngStream(0, kEstimateStream));
  const std::size_t n_batches =
      (data_.n_samples() + batch_size_ - 1) / batch_size_;
  double mean2 = 0.0;
  double mean4 = 0.0;
  for (std::size_t b = 0; b < n_batches; ++b) {
    const auto batch = batcher.next_batch();
    const double g2 = norm_sq(value_and_gradient(batch, reference).second);
    mean2 += g2;
    mean4 += g2 * g2;
  }
  mean2 /= static_cast<double>(n_batches);
  mean4 /= static_cast<double>(n_batches);
  c.sigma = std::sqrt(mean2);
  c.sigma4 = std::pow(mean4, 0.25);
  c.validate();
  return c;
}

std::pair<double, ParamVector> logistic_value_and_gradient(const LogisticProblem& p,
                                                           std::span<const std::size_t> batch,
                                                           const ParamVector& w) {
  return p.value_and_gradient(batch, w);
}

MlpProblem::MlpProblem(SparseDataset data, std::size_t hidden_width, double reg,
                       std::size_t batch_size)
    : data_(std::move(data)), width_(hidden_width), reg_(reg) {
  if (data_.n_samples() == 0) throw std::invalid_argument("MlpProblem: empty dataset");
  if (width_ == 0) throw std::invalid_argument("MlpProblem: hidden width must be positive");
  if (!std::isfinite(reg_) || reg_ < 0.0) {
    throw std::invalid_argument("MlpProblem: reg must be nonnegative");
  }
  batch_size_ = resolve_batch_size(batch_size, data_.n_samples());
}

std::size_t MlpProblem::dimension() const {
  // [W1 (width x d, row-major) | b1 | W2 | b2]
  return width_ * data_.n_features + 2 * width_ + 1;
}

std::pair<double, ParamVector> MlpProblem::value_and_gradient(std::span<const std::size_t> batch,
                                                              const ParamVector& w) const {
  require_batch(batch, data_.n_samples());
  if (w.size() != dimension()) {
    throw std::invalid_argument("MlpProblem: parameter dimension mismatch");
  }
  require_finite(w, "MlpProblem parameters");

  const std::size_t d = data_.n_features;
  const std::size_t ob1 = width_ * d;
  const std::size_t ow2 = ob1 + width_;
  const std::size_t ob2 = ow2 + width_;

  double loss = 0.0;
  ParamVector grad(w.size(), 0.0);
  std::vector<double> z1(width_);
  for (std::size_t idx : batch) {
    const double y = data_.labels[idx];
    const auto& row = data_.rows[idx];
    for (std::size_t h = 0; h < width_; ++h) {
      double z = w[ob1 + h];
      const std::size_t base = h * d;
      for (const auto& [j, v] : row) z += w[base + j] * v;
      z1[h] = z;
    }
    double score = w[ob2];
    for (std::size_t h = 0; h < width_; ++h) {
      if (z1[h] > 0.0) score += w[ow2 + h] * z1[h];
    }
    const double z = -score * y;
    loss += softplus(z);
    const double delta = -y * sigmoid(z);  // d loss / d score
    grad[ob2] += delta;
    for (std::size_t h = 0; h < width_; ++h) {
      if (z1[h] <= 0.0) continue;  // relu'(0) = 0
      grad[ow2 + h] += delta * z1[h];
      const double dz = delta * w[ow2 + h];
      grad[ob1 + h] += dz;
      const std::size_t base = h * d;
      for (const auto& [j, v] : row) grad[base + j] += dz * v;
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  loss *= inv;
  for (double& g : grad) g *= inv;
  if (reg_ > 0.0) {
    loss += 0.5 * reg_ * norm_sq(w);
    for (std::size_t i = 0; i < w.size(); ++i) grad[i] += reg_ * w[i];
  }
  return {loss, std::move(grad)};
}

ParamVector MlpProblem::gradient_at(const Draw& draw, const ParamVector& w) const {
  return value_and_gradient(draw.batch, w).second;
}

ParamVector MlpProblem::full_gradient(const ParamVector& w) const {
  return value_and_gradient(all_indices(data_.n_samples()), w).second;
}

double MlpProblem::objective(const ParamVector& w) const {
  return value_and_gradient(all_indices(data_.n_samples()), w).first;
}

std::pair<double, ParamVector> mlp_value_and_gradient(const MlpProblem& p,
                                                      std::span<const std::size_t> batch,
                                                      const ParamVector& w) {
  return p.value_and_gradient(batch, w);
}

ReferenceSolution reference_solution(const StochasticGradientOracle& p, std::uint64_t budget,
                                     std::uint64_t seed) {
  if (const auto* q = dynamic_cast<const QuadraticProblem*>(&p)) {
    return {q->minimizer(), q->minimum_value()};
  }
  if (budget < 10) throw std::invalid_argument("reference_solution: budget too small");
  if (p.sample_count() == 0) {
    throw std::invalid_argument("reference_solution: unsupported problem kind");
  }

  const double sc = p.strong_convexity();
  const StepSchedule schedule = StepSchedule::harmonic(sc > 0.0 ? 2.0 / sc : 1.0, 1.0);

  RngStream init_rng(seed, kInitStream);
  ParamVector w(p.dimension());
  for (double& x : w) x = 0.5 * init_rng.next_gaussian();

  EpochBatcher batcher(p.sample_count(), p.batch_size(), RngStream(seed, kReferenceStream));
  Draw draw;
  double f_best = p.objective(w);
  ParamVector w_best = w;
  double f_best_at_checkpoint = f_best;
  const std::uint64_t checkpoint = budget - budget / 10;
  for (std::uint64_t n = 1; n <= budget; ++n) {
    draw.batch = batcher.next_batch();
    const ParamVector g = p.gradient_at(draw, w);
    detail::tamed_update(w, g, schedule_value(schedule, n), vec_norm(g));
    const double f = p.objective(w);
    if (f < f_best) {
      f_best = f;
      w_best = w;
    }
    if (n == checkpoint) f_best_at_checkpoint = f_best;
  }

  // Flag a budget that ended while the objective was still clearly falling.
  const double improvement = f_best_at_checkpoint - f_best;
  if (improvement > 1e-3 * (1.0 + std::abs(f_best))) {
    throw std::runtime_error(
        "reference_solution: objective still decreasing at the end of the budget; "
        "increase the budget");
  }
  return {std::move(w_best), f_best};
}

}  // namespace tsgd
