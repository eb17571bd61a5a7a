#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "tsgd/experiment.hpp"
#include "tsgd/theory.hpp"

using namespace tsgd;

namespace {

const char* kQuadJson = R"({
  "problem": {"kind": "quadratic", "dim": 4, "diag_log_spaced": [1.0, 10.0], "target": 1.0,
              "noise_sigma": 1.0, "noise_kind": "gaussian"},
  "schedule": {"kind": "harmonic", "theta": 2.0, "gamma": 1.0},
  "optimizer": "tsgd",
  "n_steps": 200,
  "n_paths": 8,
  "record_every": 10,
  "seed": 5,
  "init": 0.0
})";

}  // namespace

TEST_CASE("config json round trip") {
  const ExperimentConfig cfg = ExperimentConfig::from_json_text(kQuadJson);
  CHECK(cfg.problem.kind == ProblemSpec::Kind::quadratic);
  CHECK(cfg.problem.dim == 4);
  CHECK(cfg.problem.diag_log_spaced);
  CHECK(cfg.problem.diag_log_min == 1.0);
  CHECK(cfg.problem.diag_log_max == 10.0);
  CHECK(cfg.schedule.theta == 2.0);
  CHECK(cfg.n_steps == 200);
  CHECK(cfg.optimizer == Method::tsgd);

  const std::string text = cfg.to_json_text();
  const ExperimentConfig again = ExperimentConfig::from_json_text(text);
  CHECK(again.to_json_text() == text);  // stable after one round

  // Vector init and explicit diag survive the round trip too.
  ExperimentConfig custom = cfg;
  custom.problem.diag_log_spaced = false;
  custom.problem.diag = {1.0, 2.0, 3.0, 4.0};
  custom.problem.dim = 0;
  custom.init.kind = InitSpec::Kind::vector;
  custom.init.values = {0.5, -0.25, 0.125, 2.0};
  const ExperimentConfig custom2 = ExperimentConfig::from_json_text(custom.to_json_text());
  CHECK(custom2.problem.diag == custom.problem.diag);
  CHECK(custom2.init.values == custom.init.values);
  CHECK(custom2.init.kind == InitSpec::Kind::vector);
}

TEST_CASE("config json rejects malformed input") {
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_json_text("not json"),
                       doctest::Contains("config:"), std::runtime_error);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{}"), std::runtime_error);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(
                      R"({"problem": {"kind": "banana"}, "schedule": {"kind": "harmonic",
                          "theta": 1.0}, "n_steps": 10})"),
                  std::runtime_error);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(
                      R"({"problem": {"kind": "quadratic", "diag": [1.0]},
                          "schedule": {"kind": "harmonic", "theta": 1.0},
                          "optimizer": "sag", "n_steps": 10})"),
                  std::runtime_error);
  // Validation failures surface too (n_steps = 0).
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(
                      R"({"problem": {"kind": "quadratic", "diag": [1.0]},
                          "schedule": {"kind": "harmonic", "theta": 1.0},
                          "n_steps": 0})"),
                  std::exception);
}

TEST_CASE("problem spec builds the requested oracle") {
  ProblemSpec spec;
  spec.kind = ProblemSpec::Kind::quadratic;
  spec.dim = 3;
  spec.diag_log_spaced = true;
  spec.diag_log_min = 1.0;
  spec.diag_log_max = 10.0;
  spec.target_is_fill = true;
  spec.target_fill = 2.0;
  const auto oracle = spec.build();
  const auto* q = dynamic_cast<const QuadraticProblem*>(oracle.get());
  REQUIRE(q != nullptr);
  REQUIRE(q->matrix_diag().size() == 3);
  CHECK(q->matrix_diag()[0] == 1.0);
  CHECK(q->matrix_diag()[1] == doctest::Approx(std::sqrt(10.0)).epsilon(1e-15));
  CHECK(q->matrix_diag()[2] == 10.0);
  CHECK(q->minimizer() == ParamVector{2.0, 2.0, 2.0});

  ProblemSpec bad = spec;
  bad.diag_log_min = -1.0;
  CHECK_THROWS_AS(bad.build(), std::invalid_argument);

  ProblemSpec mismatch;
  mismatch.kind = ProblemSpec::Kind::quadratic;
  mismatch.diag = {1.0, 2.0};
  mismatch.dim = 3;
  CHECK_THROWS_AS(mismatch.build(), std::invalid_argument);

  ProblemSpec logi;
  logi.kind = ProblemSpec::Kind::logistic;
  logi.data_inline = "+1 1:1\n-1 1:-1\n";
  logi.reg = 0.1;
  const auto lp = logi.build();
  CHECK(lp->sample_count() == 2);
  CHECK(lp->batch_size() == 1);  // one-percent rule floor
}

TEST_CASE("init spec resolution") {
  InitSpec fill;
  fill.kind = InitSpec::Kind::fill;
  fill.fill = 0.75;
  CHECK(fill.resolve(3, 0) == ParamVector{0.75, 0.75, 0.75});

  InitSpec vec;
  vec.kind = InitSpec::Kind::vector;
  vec.values = {1.0, 2.0};
  CHECK(vec.resolve(2, 0) == ParamVector{1.0, 2.0});
  CHECK_THROWS_AS(vec.resolve(3, 0), std::invalid_argument);

  InitSpec gauss;
  gauss.kind = InitSpec::Kind::gaussian;
  gauss.gaussian_scale = 0.5;
  const ParamVector a = gauss.resolve(4, 11);
  const ParamVector b = gauss.resolve(4, 11);
  const ParamVector c = gauss.resolve(4, 12);
  CHECK(a == b);       // same seed, same draw
  CHECK(a != c);       // the reserved init stream depends on the seed
  CHECK(a.size() == 4);
}

TEST_CASE("runs are deterministic regardless of thread count") {
  const ExperimentConfig cfg = ExperimentConfig::from_json_text(kQuadJson);
  const RunResult first = run_paths(cfg);
  const RunResult second = run_paths(cfg);
  CHECK(aggregate_csv(first.aggregate) == aggregate_csv(second.aggregate));

  // Forcing a single worker must not change anything: path randomness is
  // keyed by (seed, path index), never by scheduling.
  setenv("TSGD_THREADS", "1", 1);
  const RunResult serial = run_paths(cfg);
  unsetenv("TSGD_THREADS");
  CHECK(aggregate_csv(serial.aggregate) == aggregate_csv(first.aggregate));
  for (std::size_t p = 0; p < first.paths.size(); ++p) {
    REQUIRE(first.paths[p].rows.size() == serial.paths[p].rows.size());
    for (std::size_t r = 0; r < first.paths[p].rows.size(); ++r) {
      REQUIRE(first.paths[p].rows[r].err_sq == serial.paths[p].rows[r].err_sq);
    }
  }

  setenv("TSGD_THREADS", "zebra", 1);
  CHECK_THROWS_AS(run_paths(cfg), std::runtime_error);
  unsetenv("TSGD_THREADS");
}

TEST_CASE("aggregate statistics match a direct recomputation") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kQuadJson);
  cfg.n_paths = 3;
  const RunResult res = run_paths(cfg);
  REQUIRE(res.paths.size() == 3);
  for (std::size_t r = 0; r < res.aggregate.size(); ++r) {
    const AggregateRow& row = res.aggregate[r];
    double mean = 0.0;
    for (const RunTrace& t : res.paths) mean += t.rows[r].err_sq;
    mean /= 3.0;
    double var = 0.0;
    for (const RunTrace& t : res.paths) var += (t.rows[r].err_sq - mean) * (t.rows[r].err_sq - mean);
    var /= 2.0;
    REQUIRE(row.mean_err_sq == doctest::Approx(mean).epsilon(1e-15));
    REQUIRE(row.se_err_sq == doctest::Approx(std::sqrt(var / 3.0)).epsilon(1e-12));
    REQUIRE(row.n_paths == 3);
  }
  // Grid: rows at n = 1, 11, ..., 191, then the final iterate 201.
  CHECK(res.aggregate.front().n == 1);
  CHECK(res.aggregate.back().n == cfg.n_steps + 1);
  CHECK(res.f_star == 0.0);
  CHECK(res.w_star == ParamVector(4, 1.0));
}

TEST_CASE("plain-gradient runs trip the divergence guard and are truncated") {
  ExperimentConfig cfg;
  cfg.problem.kind = ProblemSpec::Kind::quadratic;
  cfg.problem.dim = 6;
  cfg.problem.diag_log_spaced = true;
  cfg.problem.diag_log_min = 1e-3;
  cfg.problem.diag_log_max = 1.0;
  cfg.problem.target_is_fill = true;
  cfg.problem.target_fill = 1.0;
  cfg.problem.noise_sigma = 1.0;
  cfg.schedule = StepSchedule::harmonic(2000.0, 1.0);
  cfg.optimizer = Method::sgd;
  cfg.n_steps = 400;
  cfg.n_paths = 4;
  cfg.record_every = 10;
  cfg.seed = 21;
  cfg.init.kind = InitSpec::Kind::fill;
  cfg.init.fill = 0.0;

  const RunResult res = run_paths(cfg);
  CHECK(res.diverged_paths == 4);
  for (const RunTrace& t : res.paths) {
    REQUIRE(t.diverged);
    REQUIRE(t.divergence_step <= 100);
    // The truncation row describes the first guarded iterate.
    REQUIRE(t.rows.back().n == t.divergence_step + 1);
    REQUIRE(t.rows.back().err_sq > 1e100);
  }
  // The same procedure, tamed, survives unscathed.
  cfg.optimizer = Method::tsgd;
  const RunResult tamed = run_paths(cfg);
  CHECK(tamed.diverged_paths == 0);
  CHECK(tamed.worst_pathwise_slack <= 1e-9);
}

TEST_CASE("rate fitting recovers known slopes") {
  std::vector<AggregateRow> rows;
  std::vector<AggregateRow> rows_sq;
  for (int i = 0; i < 40; ++i) {
    const std::uint64_t n = 100 + 25 * static_cast<std::uint64_t>(i);
    AggregateRow r;
    r.n = n;
    r.mean_err_sq = 5.0 / static_cast<double>(n);
    rows.push_back(r);
    r.mean_err_sq = 5.0 / (static_cast<double>(n) * static_cast<double>(n));
    rows_sq.push_back(r);
  }
  CHECK(fit_rate(rows, 0, 1e9) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(fit_rate(rows_sq, 0, 1e9) == doctest::Approx(-2.0).epsilon(1e-6));

  // Fewer than 10 points in range is an error.
  CHECK_THROWS_AS(fit_rate(rows, 100, 200), std::invalid_argument);
  // Non-positive means are rejected.
  rows[5].mean_err_sq = 0.0;
  CHECK_THROWS_AS(fit_rate(rows, 0, 1e9), std::invalid_argument);
}

TEST_CASE("gamma sweep runs both optimizers per offset") {
  ExperimentConfig base = ExperimentConfig::from_json_text(kQuadJson);
  base.n_steps = 50;
  base.n_paths = 4;
  const std::vector<double> gammas{1.0, 100.0};
  const std::vector<SweepRow> table = gamma_sweep(base, gammas);
  REQUIRE(table.size() == 4);
  CHECK(table[0].gamma == 1.0);
  CHECK(table[0].optimizer == Method::tsgd);
  CHECK(table[1].gamma == 1.0);
  CHECK(table[1].optimizer == Method::sgd);
  CHECK(table[2].gamma == 100.0);
  CHECK(table[3].gamma == 100.0);
  for (const SweepRow& row : table) {
    CHECK(std::isfinite(row.final_err));
    CHECK(row.max_err >= row.final_err - 1e-15);
  }

  ExperimentConfig flat = base;
  flat.schedule = StepSchedule::constant(0.1);
  CHECK_THROWS_AS(gamma_sweep(flat, gammas), std::invalid_argument);
  CHECK_THROWS_AS(gamma_sweep(base, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("csv emission and parsing round trip") {
  CHECK(aggregate_csv({}) == "n,alpha,mean_err_sq,se_err_sq,mean_f_gap,se_f_gap\n");
  CHECK(sweep_csv({}) == "gamma,optimizer,final_err,max_err,diverged\n");

  std::vector<AggregateRow> rows(3);
  rows[0] = {1, 1.0, 10.000000000000002, 0.0, 20.434763060936064, 4.64e-15, 8};
  rows[1] = {11, 1.0 / 6.0, 0.38033424424130069, 0.020386974658756198, -0.41794299983526917,
             0.017340579070828307, 8};
  rows[2] = {10001, 0.00019996000799840031, 4.3829745724058321e-304, 2.113600481021828e-05,
             5.3052198536055601e-04, 2.3284007424455544e-05, 8};
  const std::string text = aggregate_csv(rows);
  CHECK(text.find('\r') == std::string::npos);
  const std::vector<AggregateRow> parsed = parse_aggregate_csv(text);
  REQUIRE(parsed.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(parsed[i].n == rows[i].n);
    CHECK(parsed[i].alpha == rows[i].alpha);
    CHECK(parsed[i].mean_err_sq == rows[i].mean_err_sq);
    CHECK(parsed[i].se_err_sq == rows[i].se_err_sq);
    CHECK(parsed[i].mean_f_gap == rows[i].mean_f_gap);
    CHECK(parsed[i].se_f_gap == rows[i].se_f_gap);
  }

  CHECK_THROWS_AS(parse_aggregate_csv("bogus header\n1,2,3,4,5,6\n"), std::runtime_error);
  CHECK_THROWS_AS(
      parse_aggregate_csv("n,alpha,mean_err_sq,se_err_sq,mean_f_gap,se_f_gap\n1,2,3\n"),
      std::runtime_error);
  CHECK_THROWS_AS(
      parse_aggregate_csv("n,alpha,mean_err_sq,se_err_sq,mean_f_gap,se_f_gap\n1,x,3,4,5,6\n"),
      std::runtime_error);

  const std::string path = "/tmp/tsgd_test_agg.csv";
  emit_csv(std::span<const AggregateRow>(rows), path);
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == text);
  std::remove(path.c_str());
}

TEST_CASE("every quadratic run respects the objective sandwich row by row") {
  const ExperimentConfig cfg = ExperimentConfig::from_json_text(kQuadJson);
  const RunResult res = run_paths(cfg);
  const ProblemConstants& pc = res.constants;
  for (const RunTrace& trace : res.paths) {
    for (const TraceRow& row : trace.rows) {
      const auto [upper, lower] =
          objective_gap_sandwich(row.f_value, res.f_star, row.err_sq, pc.mu, pc.lip);
      const double scale = std::max({1.0, std::abs(row.f_value), std::abs(res.f_star)});
      REQUIRE(upper >= -1e-9 * scale);
      REQUIRE(lower >= -1e-9 * scale);
    }
  }
}
