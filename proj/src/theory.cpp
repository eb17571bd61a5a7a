#include "tsgd/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tsgd/steps.hpp"

namespace tsgd {

namespace {

void require_finite_scalar(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + ": non-finite value");
  }
}

void require_nonneg(double v, const char* what) {
  require_finite_scalar(v, what);
  if (v < 0.0) throw std::invalid_argument(std::string(what) + ": must be nonnegative");
}

void require_positive(double v, const char* what) {
  require_finite_scalar(v, what);
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + ": must be positive");
}

// The three-branch tail of the decay envelope; shared with the sum bound.
double envelope_tail(double n, double x, double y) {
  const double npy1 = n + 1.0 + y;
  if (x > 1.0) return 1.0 / (npy1 * (x - 1.0));
  if (x == 1.0) return (1.0 + std::log(n + y)) / npy1;
  return std::pow(npy1, -x) * std::pow(1.0 + y, x - 2.0) * (x - 2.0 - y) / (x - 1.0);
}

}  // namespace

ParamVector tamed_map(double alpha, const ParamVector& grad_at_w, double grad_at_z_norm,
                      const ParamVector& w) {
  require_positive(alpha, "tamed_map alpha");
  require_nonneg(grad_at_z_norm, "tamed_map grad_at_z_norm");
  require_finite(grad_at_w, "tamed_map gradient");
  require_finite(w, "tamed_map w");
  require_same_size(grad_at_w, w, "tamed_map");
  ParamVector out = w;
  detail::tamed_update(out, grad_at_w, alpha, grad_at_z_norm);
  return out;
}

double tamed_map_identity_gap(double alpha, double xi, const ParamVector& grad_at_w,
                              double grad_at_z_norm, const ParamVector& w) {
  require_nonneg(xi, "tamed_map_identity_gap xi");
  const ParamVector mapped = tamed_map(alpha, grad_at_w, grad_at_z_norm, w);
  ParamVector displaced(w.size());
  const double denom_xi = 1.0 + alpha * xi;
  for (std::size_t i = 0; i < w.size(); ++i) {
    displaced[i] = mapped[i] - w[i] + (alpha * grad_at_w[i]) / denom_xi;
  }
  const double lhs = vec_norm(displaced);
  const double gw = vec_norm(grad_at_w);
  const double rhs = alpha * alpha * std::abs(xi - grad_at_z_norm) * gw /
                     ((1.0 + alpha * grad_at_z_norm) * denom_xi);
  return std::abs(lhs - rhs);
}

double pathwise_bound_slack(const RunTrace& trace, const ParamVector& w_star,
                            const ParamVector& w1) {
  if (trace.rows.empty()) throw std::invalid_argument("pathwise_bound_slack: empty trace");
  const double init_dist = vec_dist(w1, w_star);
  double worst = -std::numeric_limits<double>::infinity();
  for (const TraceRow& row : trace.rows) {
    if (!std::isfinite(row.err_sq) || !std::isfinite(row.cum_tamed)) {
      throw std::invalid_argument("pathwise_bound_slack: trace is missing error fields");
    }
    const double slack = std::sqrt(row.err_sq) - init_dist - row.cum_tamed;
    worst = std::max(worst, slack);
  }
  return worst;
}

double decay_envelope(std::uint64_t n, double x, double y, double k, double init_err_sq) {
  if (n < 1) throw std::invalid_argument("decay_envelope: n must be >= 1");
  require_nonneg(x, "decay_envelope exponent");
  require_nonneg(y, "decay_envelope offset");
  require_nonneg(k, "decay_envelope k");
  require_nonneg(init_err_sq, "decay_envelope init_err_sq");
  const double nd = static_cast<double>(n);
  const double first = init_err_sq * std::pow(1.0 + y, x) * std::pow(nd + 1.0 + y, -x);
  return first + std::exp(x / (1.0 + y)) * k * envelope_tail(nd, x, y);
}

double harmonic_envelope(std::uint64_t n, double theta, double gamma, double mu, double k,
                         double init_err_sq) {
  require_positive(theta, "harmonic_envelope theta");
  require_nonneg(mu, "harmonic_envelope mu");
  return decay_envelope(n, 2.0 * theta * mu, gamma, k, init_err_sq);
}

double contraction_constant(double theta, double gamma, double mu, double lipschitz,
                            double sigma_at_star, double init_dist) {
  require_nonneg(theta, "contraction_constant theta");
  require_nonneg(gamma, "contraction_constant gamma");
  require_nonneg(mu, "contraction_constant mu");
  require_nonneg(lipschitz, "contraction_constant lipschitz");
  require_nonneg(sigma_at_star, "contraction_constant sigma_at_star");
  require_nonneg(init_dist, "contraction_constant init_dist");
  const double denom =
      gamma + theta * lipschitz * init_dist + gamma * theta * lipschitz + theta * sigma_at_star;
  if (denom == 0.0) {
    throw std::invalid_argument("contraction_constant: zero denominator");
  }
  return 2.0 * gamma * theta * mu / denom;
}

double bounded_gradient_envelope(std::uint64_t n, double theta, double gamma, double mu,
                                 double b_bound, double k, double init_err_sq) {
  require_positive(theta, "bounded_gradient_envelope theta");
  require_nonneg(gamma, "bounded_gradient_envelope gamma");
  require_nonneg(mu, "bounded_gradient_envelope mu");
  require_nonneg(b_bound, "bounded_gradient_envelope b_bound");
  if (1.0 + gamma < theta * (2.0 * mu - b_bound)) {
    throw std::invalid_argument(
        "bounded_gradient_envelope: requires 1 + gamma >= theta * (2 mu - b)");
  }
  return decay_envelope(n, 2.0 * theta * mu, gamma + theta * b_bound, theta * theta * k,
                        init_err_sq);
}

std::pair<double, double> objective_gap_sandwich(double f_at_w, double f_at_star, double dist_sq,
                                                 double mu, double lipschitz) {
  require_finite_scalar(f_at_w, "objective_gap_sandwich f_at_w");
  require_finite_scalar(f_at_star, "objective_gap_sandwich f_at_star");
  require_nonneg(dist_sq, "objective_gap_sandwich dist_sq");
  require_nonneg(mu, "objective_gap_sandwich mu");
  require_nonneg(lipschitz, "objective_gap_sandwich lipschitz");
  if (mu > lipschitz) {
    throw std::invalid_argument("objective_gap_sandwich: mu must not exceed lipschitz");
  }
  const double gap = f_at_w - f_at_star;
  const double scale = std::max({1.0, std::abs(f_at_w), std::abs(f_at_star)});
  if (gap < -1e-9 * scale) {
    throw std::invalid_argument("objective_gap_sandwich: f_at_w is below f_at_star");
  }
  return {0.5 * lipschitz * dist_sq - gap, gap - 0.5 * mu * dist_sq};
}

namespace {

void require_bound_region(double x, double y) {
  require_positive(x, "x");
  require_positive(y, "y");
  if (x > 1.0 + y) {
    throw std::invalid_argument("bound requires x <= 1 + y");
  }
}

}  // namespace

std::pair<double, double> harmonic_product_bound(double x, double y, std::uint64_t m,
                                                 std::uint64_t n) {
  require_bound_region(x, y);
  if (m < 1 || m > n + 1) {
    throw std::invalid_argument("harmonic_product_bound: requires 1 <= m <= n + 1");
  }
  double product = 1.0;
  for (std::uint64_t i = m; i <= n; ++i) {
    product *= 1.0 - x / (static_cast<double>(i) + y);
  }
  const double bound =
      std::pow((static_cast<double>(n) + 1.0 + y) / (static_cast<double>(m) + y), -x);
  return {product, bound};
}

std::pair<double, double> harmonic_sum_bound(double x, double y, std::uint64_t n) {
  require_bound_region(x, y);
  if (n < 1) throw std::invalid_argument("harmonic_sum_bound: n must be >= 1");
  // Exact accumulation: appending term i multiplies every earlier summand by
  // (1 - x/(i+y)) and adds (i+y)^{-2}.
  double value = 0.0;
  for (std::uint64_t i = 1; i <= n; ++i) {
    const double ipy = static_cast<double>(i) + y;
    value = value * (1.0 - x / ipy) + 1.0 / (ipy * ipy);
  }
  const double bound = std::exp(x / (1.0 + y)) * envelope_tail(static_cast<double>(n), x, y);
  return {value, bound};
}

std::pair<double, double> tangent_line_bound(double a, double b, double x) {
  require_positive(a, "tangent_line_bound a");
  require_positive(b, "tangent_line_bound b");
  require_positive(x, "tangent_line_bound x");
  return {-1.0 / (a * x + b), -1.0 / b + (a / (b * b)) * x};
}

ErrorMoments estimate_error_moments(std::span<const RunTrace> paths) {
  if (paths.size() < 30) {
    throw std::invalid_argument("estimate_error_moments: need at least 30 paths");
  }
  const std::size_t n_rows = paths.front().rows.size();
  for (const RunTrace& t : paths) {
    if (t.rows.size() != n_rows) {
      throw std::invalid_argument("estimate_error_moments: traces do not share a recording grid");
    }
  }
  ErrorMoments c;
  for (std::size_t r = 0; r < n_rows; ++r) {
    const std::uint64_t n = paths.front().rows[r].n;
    double mean2 = 0.0;
    double mean4 = 0.0;
    for (const RunTrace& t : paths) {
      if (t.rows[r].n != n) {
        throw std::invalid_argument(
            "estimate_error_moments: traces do not share a recording grid");
      }
      const double e2 = t.rows[r].err_sq;
      if (!std::isfinite(e2)) {
        throw std::invalid_argument("estimate_error_moments: non-finite recorded error");
      }
      mean2 += e2;
      mean4 += e2 * e2;
    }
    mean2 /= static_cast<double>(paths.size());
    mean4 /= static_cast<double>(paths.size());
    c.m2 = std::max(c.m2, mean2);
    c.m4 = std::max(c.m4, mean4);
  }
  c.empirical = true;
  return c;
}

double envelope_k(double theta, double lipschitz, double mu2, double sigma, double m2, double m4) {
  require_positive(theta, "envelope_k theta");
  require_nonneg(lipschitz, "envelope_k lipschitz");
  require_nonneg(mu2, "envelope_k mu2");
  require_nonneg(sigma, "envelope_k sigma");
  require_nonneg(m2, "envelope_k m2");
  require_nonneg(m4, "envelope_k m4");
  const double t2 = 2.0 * theta * theta;
  return t2 * lipschitz * mu2 * std::pow(m4, 0.75) +
         (t2 * lipschitz * lipschitz + t2 * lipschitz * sigma + t2 * mu2 * sigma) * m2 +
         t2 * sigma * sigma * std::sqrt(m2) + t2 * sigma * sigma;
}

double contraction_envelope_k(double theta, double lipschitz, double sigma, double m2) {
  require_positive(theta, "contraction_envelope_k theta");
  require_nonneg(lipschitz, "contraction_envelope_k lipschitz");
  require_nonneg(sigma, "contraction_envelope_k sigma");
  require_nonneg(m2, "contraction_envelope_k m2");
  return 2.0 * theta * theta *
         ((lipschitz * lipschitz + lipschitz * sigma) * m2 + sigma * sigma +
          sigma * sigma * std::sqrt(m2));
}

double bounded_envelope_k(double b_bound, double noise_ratio, double sigma, double m2) {
  require_nonneg(b_bound, "bounded_envelope_k b_bound");
  require_nonneg(noise_ratio, "bounded_envelope_k noise_ratio");
  require_nonneg(sigma, "bounded_envelope_k sigma");
  require_nonneg(m2, "bounded_envelope_k m2");
  return (4.0 + 6.0 * noise_ratio * noise_ratio) * b_bound * b_bound +
         2.0 * (b_bound * b_bound * noise_ratio + sigma * b_bound) * std::sqrt(m2);
}

}  // namespace tsgd
