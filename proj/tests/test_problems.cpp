#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tsgd/dataset.hpp"
#include "tsgd/problems.hpp"
#include "tsgd/rng.hpp"
#include "tsgd/vec.hpp"

using namespace tsgd;

namespace {

constexpr double kLn2 = 0.6931471805599453;

double batch_value(const LogisticProblem& p, const std::vector<std::size_t>& batch,
                   const ParamVector& w) {
  return p.value_and_gradient(batch, w).first;
}

double batch_value(const MlpProblem& p, const std::vector<std::size_t>& batch,
                   const ParamVector& w) {
  return p.value_and_gradient(batch, w).first;
}

template <typename Problem>
void check_fd(const Problem& p, const std::vector<std::size_t>& batch, const ParamVector& w,
              double rel_tol) {
  const ParamVector analytic = p.value_and_gradient(batch, w).second;
  ParamVector probe = w;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double keep = probe[i];
    const double h = 1e-5 * std::max(1.0, std::abs(keep));
    probe[i] = keep + h;
    const double fp = batch_value(p, batch, probe);
    probe[i] = keep - h;
    const double fm = batch_value(p, batch, probe);
    probe[i] = keep;
    const double fd = (fp - fm) / (2.0 * h);
    const double scale = std::max(1.0, std::abs(analytic[i]));
    REQUIRE(std::abs(fd - analytic[i]) <= rel_tol * scale);
  }
}

}  // namespace

TEST_CASE("quadratic constants examples") {
  {
    const QuadraticProblem p({1.0, 1.0}, {0.0, 0.0}, 0.0);
    const ProblemConstants c = quadratic_constants(p);
    CHECK(c.mu == 1.0);
    CHECK(c.lip == 1.0);
    CHECK(c.sigma == 0.0);
    CHECK(c.sigma4 == 0.0);
    CHECK(c.grad_bound.has_value());  // zero noise means the gradient at w* is 0
    CHECK(*c.grad_bound == 0.0);
  }
  {
    const QuadraticProblem p({1.0, 10.0}, {0.0, 0.0}, 0.0);
    const ProblemConstants c = quadratic_constants(p);
    CHECK(c.mu == 1.0);
    CHECK(c.lip == 10.0);
    CHECK(c.mu2 == 1.0);
    CHECK(c.lip4 == 10.0);
  }
  {
    const QuadraticProblem p({2.0}, {0.0}, 0.5, QuadraticProblem::NoiseKind::gaussian);
    const ProblemConstants c = quadratic_constants(p);
    CHECK(c.sigma == 0.5);  // E||eta||^2 = 1 for a scalar standard gaussian
    CHECK(c.sigma4 == 0.6580370064762462);
    CHECK_FALSE(c.grad_bound.has_value());  // gaussian noise is unbounded
    CHECK_FALSE(c.noise_ratio.has_value());
  }
  {
    const QuadraticProblem p(std::vector<double>(10, 1.0), ParamVector(10, 0.0), 1.0,
                             QuadraticProblem::NoiseKind::gaussian);
    const ProblemConstants c = quadratic_constants(p);
    CHECK(c.sigma == 3.1622776601683795);   // sqrt(10)
    CHECK(c.sigma4 == 3.309750919646873);   // (d^2 + 2d)^{1/4}
  }
  {
    const QuadraticProblem p(std::vector<double>(10, 1.0), ParamVector(10, 0.0), 1.0,
                             QuadraticProblem::NoiseKind::bounded_uniform);
    const ProblemConstants c = quadratic_constants(p);
    CHECK(c.sigma == 1.8257418583505538);   // sqrt(d/3)
    CHECK(c.sigma4 == 1.8612097182041991);  // (d/5 + d(d-1)/9)^{1/4}
    REQUIRE(c.grad_bound.has_value());
    CHECK(*c.grad_bound == 3.1622776601683795);  // sqrt(d) * scale at w*
    REQUIRE(c.noise_ratio.has_value());
    CHECK(*c.noise_ratio == 1.0);
    CHECK_NOTHROW(c.validate());
  }
  CHECK_THROWS_AS(QuadraticProblem({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(QuadraticProblem({-1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(QuadraticProblem({1.0}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("quadratic gradient, objective, and noise model") {
  const QuadraticProblem p({1.0, 4.0}, {1.0, -1.0}, 0.0);
  const ParamVector w{3.0, 0.0};
  const ParamVector g = p.full_gradient(w);
  CHECK(g[0] == 2.0);  // 1 * (3 - 1)
  CHECK(g[1] == 4.0);  // 4 * (0 + 1)
  CHECK(p.objective(w) == doctest::Approx(0.5 * (1.0 * 4.0 + 4.0 * 1.0)));
  CHECK(p.objective(p.minimizer()) == 0.0);
  CHECK(vec_norm(p.full_gradient(p.minimizer())) == 0.0);

  // Unbiasedness: the sample mean of noisy gradients approaches the exact one.
  const QuadraticProblem noisy({1.0, 4.0}, {1.0, -1.0}, 0.7);
  RngStream rng(17, 0);
  ParamVector mean(2, 0.0);
  const int n_draws = 10000;
  for (int i = 0; i < n_draws; ++i) {
    const Draw draw = noisy.sample_draw(rng);
    const ParamVector gi = noisy.gradient_at(draw, w);
    mean[0] += gi[0];
    mean[1] += gi[1];
  }
  mean[0] /= n_draws;
  mean[1] /= n_draws;
  const double se = 0.7 / std::sqrt(static_cast<double>(n_draws));
  CHECK(std::abs(mean[0] - g[0]) < 4.0 * se);
  CHECK(std::abs(mean[1] - g[1]) < 4.0 * se);
}

TEST_CASE("bounded noise draws stay in the unit box") {
  const QuadraticProblem p({1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}, 2.0,
                           QuadraticProblem::NoiseKind::bounded_uniform);
  RngStream rng(5, 3);
  const ParamVector w{1.0, 2.0, 3.0};
  const ParamVector base = p.full_gradient(w);
  for (int i = 0; i < 1000; ++i) {
    const Draw draw = p.sample_draw(rng);
    REQUIRE(draw.noise.size() == 3);
    for (double eta : draw.noise) {
      REQUIRE(eta >= -1.0);
      REQUIRE(eta <= 1.0);
    }
    const ParamVector g = p.gradient_at(draw, w);
    for (std::size_t j = 0; j < 3; ++j) REQUIRE(std::abs(g[j] - base[j]) <= 2.0);
  }
}

TEST_CASE("logistic loss and gradient examples") {
  // At w = 0 the per-sample loss is ln 2 regardless of the sample.
  const LogisticProblem p(parse_libsvm("+1 1:1.5 2:-0.5\n-1 1:0.25\n"), 0.0, 1, true);
  const ParamVector zero(p.dimension(), 0.0);
  CHECK(p.objective(zero) == doctest::Approx(kLn2).epsilon(1e-15));

  // Single sample x=[1], y=+1, no bias, lambda=0: gradient at 0 is [-0.5].
  const LogisticProblem single(parse_libsvm("+1 1:1\n"), 0.0, 1, false);
  const ParamVector g = single.full_gradient({0.0});
  CHECK(g.size() == 1);
  CHECK(g[0] == -0.5);

  // Zero-feature sample, no bias: the loss gradient vanishes so only the
  // ridge term remains, exactly lambda * w.
  SparseDataset empty_row;
  empty_row.n_features = 2;
  empty_row.rows = {{}};
  empty_row.labels = {1.0};
  const LogisticProblem ridge_only(empty_row, 0.3, 1, false);
  const ParamVector w{1.25, -0.5};
  const ParamVector gr = ridge_only.full_gradient(w);
  CHECK(gr[0] == 0.3 * 1.25);
  CHECK(gr[1] == 0.3 * -0.5);
}

TEST_CASE("logistic value is numerically stable for huge scores") {
  const LogisticProblem p(parse_libsvm("+1 1:1\n-1 1:1\n"), 0.0, 1, false);
  const double f_pos = p.value_and_gradient(std::vector<std::size_t>{0}, {800.0}).first;
  CHECK(f_pos == doctest::Approx(0.0));
  const double f_neg = p.value_and_gradient(std::vector<std::size_t>{1}, {800.0}).first;
  CHECK(f_neg == doctest::Approx(800.0));  // softplus(800) ~ 800, no overflow
  CHECK(std::isfinite(f_neg));
}

TEST_CASE("logistic smoothness bound") {
  // Features (3,4) with bias: ||x~||^2 = 9 + 16 + 1 = 26; L = 26/4 + reg.
  const LogisticProblem p(parse_libsvm("+1 1:3 2:4\n-1 1:1\n"), 0.5, 1, true);
  CHECK(p.lipschitz_bound() == doctest::Approx(26.0 / 4.0 + 0.5).epsilon(1e-15));
  const ProblemConstants c = p.constants(ParamVector(p.dimension(), 0.0));
  CHECK(c.mu == 0.5);
  CHECK(c.mu2 == 0.5);
  CHECK(c.lip == doctest::Approx(26.0 / 4.0 + 0.5));
  CHECK(c.sigma <= c.sigma4 + 1e-12);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("logistic and mlp gradients match finite differences") {
  RngStream rng(31, 0);
  for (int instance = 0; instance < 6; ++instance) {
    const std::size_t d = 2 + rng.next_below(5);
    const std::size_t n = 2 + rng.next_below(6);
    SparseDataset ds;
    ds.n_features = d;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::pair<std::size_t, double>> row;
      for (std::size_t j = 0; j < d; ++j) {
        if (rng.next_unit() < 0.7) row.emplace_back(j, 2.0 * rng.next_gaussian());
      }
      ds.rows.push_back(std::move(row));
      ds.labels.push_back(rng.next_unit() < 0.5 ? -1.0 : 1.0);
    }

    std::vector<std::size_t> batch(n);
    for (std::size_t i = 0; i < n; ++i) batch[i] = i;

    const LogisticProblem logi(ds, 0.05, 1, true);
    ParamVector w(logi.dimension());
    for (double& x : w) x = 0.8 * rng.next_gaussian();
    check_fd(logi, batch, w, 1e-5);

    const MlpProblem mlp(ds, 3, 0.05, 1);
    ParamVector wm(mlp.dimension());
    for (double& x : wm) x = 0.8 * rng.next_gaussian();
    check_fd(mlp, batch, wm, 1e-5);
  }
}

TEST_CASE("mlp examples") {
  SparseDataset ds;
  ds.n_features = 1;
  ds.rows = {{{0, 2.0}}};
  ds.labels = {1.0};

  // All weights zero: score 0, loss ln 2.
  const MlpProblem p(ds, 4, 0.0, 1);
  const ParamVector zero(p.dimension(), 0.0);
  CHECK(p.objective(zero) == doctest::Approx(kLn2).epsilon(1e-15));

  // Hand chain rule on a width-1 instance in the linear region:
  // x=2, y=+1, W1=0.5, b1=0.25, W2=1.5, b2=-0.5.
  const MlpProblem tiny(ds, 1, 0.0, 1);
  const ParamVector w{0.5, 0.25, 1.5, -0.5};
  const auto [value, grad] = tiny.value_and_gradient(std::vector<std::size_t>{0}, w);
  CHECK(value == doctest::Approx(0.22541265160164792).epsilon(1e-15));
  CHECK(grad[0] == doctest::Approx(-0.6054396667811366).epsilon(1e-14));   // dW1
  CHECK(grad[1] == doctest::Approx(-0.3027198333905683).epsilon(1e-14));   // db1
  CHECK(grad[2] == doctest::Approx(-0.25226652782547354).epsilon(1e-14));  // dW2
  CHECK(grad[3] == doctest::Approx(-0.20181322226037884).epsilon(1e-14));  // db2

  // The ridge contribution is exactly lambda * w: compare lambda > 0 vs 0.
  const MlpProblem with_reg(ds, 1, 0.4, 1);
  const ParamVector g0 = tiny.full_gradient(w);
  const ParamVector g1 = with_reg.full_gradient(w);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(g1[i] - g0[i] == doctest::Approx(0.4 * w[i]));
}

TEST_CASE("mlp relu derivative at zero is zero") {
  // Zero feature and b1 = 0 put the hidden unit exactly at the kink; with
  // relu'(0) = 0 nothing propagates into W1/b1, while b2 still moves.
  SparseDataset ds;
  ds.n_features = 1;
  ds.rows = {{}};
  ds.labels = {1.0};
  const MlpProblem p(ds, 1, 0.0, 1);
  const ParamVector w{3.0, 0.0, 2.0, 0.0};  // W1=3, b1=0, W2=2, b2=0
  const ParamVector g = p.full_gradient(w);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 0.0);   // relu(0) = 0 hidden activation
  CHECK(g[3] == -0.5);  // -y * sigmoid(0)
}

TEST_CASE("strong convexity and smoothness inequalities hold") {
  RngStream rng(47, 0);

  const QuadraticProblem quad({1.0, 2.5, 10.0}, {0.5, -1.0, 2.0}, 0.0);
  const ProblemConstants qc = quadratic_constants(quad);

  const LogisticProblem logi(
      parse_libsvm("+1 1:1.0 2:0.5\n+1 1:0.8 2:1.2\n-1 1:-1.0 2:-0.3\n-1 1:-0.7 2:-1.1\n"), 0.1,
      1, true);
  const double logi_mu = 0.1;
  const double logi_lip = logi.lipschitz_bound();

  for (int trial = 0; trial < 1000; ++trial) {
    {
      ParamVector v(3), w(3);
      for (std::size_t i = 0; i < 3; ++i) {
        v[i] = 3.0 * rng.next_gaussian();
        w[i] = 3.0 * rng.next_gaussian();
      }
      const double fv = quad.objective(v);
      const double fw = quad.objective(w);
      const ParamVector gw = quad.full_gradient(w);
      double inner = 0.0;
      double dist_sq = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        inner += gw[i] * (v[i] - w[i]);
        dist_sq += (v[i] - w[i]) * (v[i] - w[i]);
      }
      const double scale = std::max({1.0, std::abs(fv), std::abs(fw)});
      REQUIRE(fv - (fw + inner + 0.5 * qc.mu * dist_sq) >= -1e-9 * scale);
      REQUIRE((fw + inner + 0.5 * qc.lip * dist_sq) - fv >= -1e-9 * scale);
    }
    {
      ParamVector v(logi.dimension()), w(logi.dimension());
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = 2.0 * rng.next_gaussian();
        w[i] = 2.0 * rng.next_gaussian();
      }
      const double fv = logi.objective(v);
      const double fw = logi.objective(w);
      const ParamVector gw = logi.full_gradient(w);
      double inner = 0.0;
      double dist_sq = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        inner += gw[i] * (v[i] - w[i]);
        dist_sq += (v[i] - w[i]) * (v[i] - w[i]);
      }
      const double scale = std::max({1.0, std::abs(fv), std::abs(fw)});
      REQUIRE(fv - (fw + inner + 0.5 * logi_mu * dist_sq) >= -1e-9 * scale);
      REQUIRE((fw + inner + 0.5 * logi_lip * dist_sq) - fv >= -1e-9 * scale);
    }
  }
}

TEST_CASE("reference solution is exact for quadratics") {
  const QuadraticProblem p({1.0, 10.0}, {3.0, -1.0}, 0.5);
  const ReferenceSolution ref = reference_solution(p, 100, 0);
  CHECK(ref.w == ParamVector{3.0, -1.0});
  CHECK(ref.f == 0.0);
}

TEST_CASE("reference solution matches a deterministic full-gradient solve") {
  // Separable toy problem; the frozen optimum comes from an independent
  // full-batch gradient descent run to stationarity (gradient norm < 1e-15):
  // F* = 0.2746410284945303 at w* ~ (1.24243, 0.97648, -0.05606).
  const LogisticProblem p(
      parse_libsvm("+1 1:1.0 2:0.5\n+1 1:0.8 2:1.2\n-1 1:-1.0 2:-0.3\n-1 1:-0.7 2:-1.1\n"), 0.1,
      1, true);
  const ReferenceSolution ref = reference_solution(p, 60000, 1);
  CHECK(ref.f == doctest::Approx(0.2746410284945303).epsilon(1e-6));
  CHECK(std::abs(ref.f - p.objective(ref.w)) <= 1e-12 * std::max(1.0, std::abs(ref.f)));
}

TEST_CASE("reference solution for the mlp returns the lowest recorded value") {
  SparseDataset ds = parse_libsvm("+1 1:1.0\n-1 1:-1.0\n+1 1:0.5\n-1 1:-0.25\n");
  const MlpProblem p(ds, 2, 0.05, 1);
  const ReferenceSolution ref = reference_solution(p, 20000, 2);
  CHECK(std::isfinite(ref.f));
  // No exactness claim, but the recorded best cannot exceed the start value.
  CHECK(ref.f <= p.objective(ParamVector(p.dimension(), 0.0)) + 1.0);
  CHECK(ref.w.size() == p.dimension());
}

TEST_CASE("gradient_at is deterministic given the draw") {
  const QuadraticProblem p({2.0, 3.0}, {0.0, 0.0}, 1.5);
  RngStream rng(8, 0);
  const Draw draw = p.sample_draw(rng);
  const ParamVector w{0.4, -0.9};
  CHECK(p.gradient_at(draw, w) == p.gradient_at(draw, w));
}
