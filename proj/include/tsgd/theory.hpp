#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "tsgd/trace.hpp"
#include "tsgd/vec.hpp"

namespace tsgd {

// Error-moment estimates feeding the envelope constants. m2 and m4 bound
// sup_n E||w^n - w*||^2 and sup_n E||w^n - w*||^4 empirically.
struct ErrorMoments {
  double m2 = 0.0;
  double m4 = 0.0;
  bool empirical = true;
};

// Tamed map with the taming norm frozen at a point z:
//   w - alpha * g(w) / (1 + alpha * ||g(z)||).
// With ||g(z)|| = ||g(w)|| this is exactly (bitwise) the tamed step.
ParamVector tamed_map(double alpha, const ParamVector& grad_at_w, double grad_at_z_norm,
                      const ParamVector& w);

// Residual of the frozen-denominator identity: the distance between the
// tamed-map displacement and -alpha g(w)/(1 + alpha xi) equals
//   alpha^2 |xi - ||g(z)||| ||g(w)|| / ((1 + alpha||g(z)||)(1 + alpha xi)).
// Returns | lhs - rhs |, which is zero up to rounding.
double tamed_map_identity_gap(double alpha, double xi, const ParamVector& grad_at_w,
                              double grad_at_z_norm, const ParamVector& w);

// Worst slack of the pathwise a priori bound
//   ||w^n - w*|| <= ||w^1 - w*|| + sum_{i<n} min{1, alpha_i ||g_i||}
// over the recorded rows of one trace. Nonpositive (up to rounding) for
// every tamed-step path.
double pathwise_bound_slack(const RunTrace& trace, const ParamVector& w_star,
                            const ParamVector& w1);

// Three-branch decay envelope shared by the a priori bounds:
//   init * (1+y)^x (n+1+y)^{-x} + exp(x/(1+y)) * k * tail(n, x, y)
// where tail is (n+1+y)^{-1}/(x-1) for x > 1,
//               (n+1+y)^{-1} (1 + ln(n+y)) for x = 1,
//               (n+1+y)^{-x} (1+y)^{x-2} (x-2-y)/(x-1) for 0 <= x < 1.
double decay_envelope(std::uint64_t n, double x, double y, double k, double init_err_sq);

// Envelope for the harmonic schedule under the higher-moment assumptions;
// the decay exponent is 2*theta*mu. The closed form is evaluated for any
// positive theta, including values beyond the regime the proof needs.
double harmonic_envelope(std::uint64_t n, double theta, double gamma, double mu, double k,
                         double init_err_sq);

// Contraction exponent available without higher moments:
//   C = 2 gamma theta mu / (gamma + theta L d1 + gamma theta L + theta sigma*),
// deterministic single-draw surrogate with d1 = ||w^1 - w*||. Lies in
// (0, 1+gamma] in the admissible regime and tends to 2 theta mu/(1 + theta L)
// as gamma grows.
double contraction_constant(double theta, double gamma, double mu, double lipschitz,
                            double sigma_at_star, double init_dist);

// Envelope under an almost-sure gradient bound b: offset gamma + theta*b,
// exponent 2*theta*mu, second term scaled by theta^2 * k. Requires
// 1 + gamma >= theta*(2*mu - b).
double bounded_gradient_envelope(std::uint64_t n, double theta, double gamma, double mu,
                                 double b_bound, double k, double init_err_sq);

// Slacks of the two-sided objective-gap bound
//   (mu/2)||w - w*||^2 <= F(w) - F(w*) <= (lip/2)||w - w*||^2,
// returned as (upper slack, lower slack); both are nonnegative up to
// rounding when the bound holds.
std::pair<double, double> objective_gap_sandwich(double f_at_w, double f_at_star, double dist_sq,
                                                 double mu, double lipschitz);

// Product bound: returns (prod_{i=m}^{n} (1 - x/(i+y)), ((n+1+y)/(m+y))^{-x}).
// Requires x, y > 0, x <= 1+y, 1 <= m <= n+1; m = n+1 gives the empty
// product 1.
std::pair<double, double> harmonic_product_bound(double x, double y, std::uint64_t m,
                                                 std::uint64_t n);

// Sum bound: returns the exact value of
//   sum_{i=1}^{n} (i+y)^{-2} prod_{j=i+1}^{n} (1 - x/(j+y))
// and its closed-form bound exp(x/(1+y)) * tail(n, x, y). Same admissible
// region as the product bound.
std::pair<double, double> harmonic_sum_bound(double x, double y, std::uint64_t n);

// Tangent-line bound for the negative reciprocal: returns
// (-1/(a x + b), -1/b + (a/b^2) x); the first is <= the second for
// a, b, x > 0.
std::pair<double, double> tangent_line_bound(double a, double b, double x);

// Empirical error moments over a set of aligned traces (>= 30 paths, same
// recording grid): m2 = max_n mean(err_sq), m4 = max_n mean(err_sq^2).
ErrorMoments estimate_error_moments(std::span<const RunTrace> paths);

// Envelope constant under the higher-moment assumptions:
//   2 t^2 L mu2 m4^{3/4} + (2 t^2 L^2 + 2 t^2 L s + 2 t^2 mu2 s) m2
//   + 2 t^2 s^2 m2^{1/2} + 2 t^2 s^2,  t = theta, s = sigma.
double envelope_k(double theta, double lipschitz, double mu2, double sigma, double m2, double m4);

// Envelope constant without higher moments:
//   2 theta^2 ((L^2 + L s) m2 + s^2 + s^2 m2^{1/2}).
double contraction_envelope_k(double theta, double lipschitz, double sigma, double m2);

// Envelope constant under an almost-sure gradient bound (passed to
// bounded_gradient_envelope, which applies the theta^2 scaling itself):
//   (4 + 6 d^2) b^2 + 2 (b^2 d + sigma b) m2^{1/2}.
double bounded_envelope_k(double b_bound, double noise_ratio, double sigma, double m2);

}  // namespace tsgd
