#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tsgd/oracle.hpp"
#include "tsgd/problems.hpp"
#include "tsgd/schedule.hpp"
#include "tsgd/trace.hpp"

namespace tsgd {

// Iterate entries beyond this magnitude trip the divergence guard; the path
// is truncated at that step and flagged.
inline constexpr double kDivergenceGuard = 1e150;

struct ProblemSpec {
  enum class Kind { quadratic, logistic, mlp };

  Kind kind = Kind::quadratic;

  // quadratic
  std::size_t dim = 0;
  std::vector<double> diag;            // explicit eigenvalues, or
  double diag_log_min = 0.0;           // log-spaced over [min, max] when set
  double diag_log_max = 0.0;
  bool diag_log_spaced = false;
  std::vector<double> target;          // w*; scalar fill when target_fill set
  double target_fill = 0.0;
  bool target_is_fill = true;
  double noise_sigma = 0.0;
  QuadraticProblem::NoiseKind noise_kind = QuadraticProblem::NoiseKind::gaussian;

  // finite-sum
  std::string data_path;               // file path, or
  std::string data_inline;             // literal text, for self-contained configs
  double reg = 0.0;
  std::size_t batch_size = 0;          // 0 -> 1% default
  bool with_bias = true;               // logistic only
  std::size_t hidden_width = 0;        // mlp only

  std::unique_ptr<StochasticGradientOracle> build() const;
};

struct InitSpec {
  enum class Kind { fill, vector, gaussian };

  Kind kind = Kind::fill;
  double fill = 0.0;
  std::vector<double> values;
  double gaussian_scale = 0.0;  // w^1 = scale * N(0, I) draws on a reserved stream

  ParamVector resolve(std::size_t dim, std::uint64_t seed) const;
};

enum class Method { tsgd, sgd };

const char* method_name(Method m);

struct ExperimentConfig {
  ProblemSpec problem;
  StepSchedule schedule;
  Method optimizer = Method::tsgd;
  std::uint64_t n_steps = 1000;
  std::uint64_t n_paths = 1;
  std::uint64_t record_every = 10;
  std::uint64_t seed = 0;
  InitSpec init;
  std::uint64_t reference_budget = 0;  // 0 -> 2*n_steps + 1000 for finite-sum problems
  std::string output;                  // default CSV path for the CLI

  void validate() const;

  // Lossless JSON round-trip.
  static ExperimentConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
};

struct AggregateRow {
  std::uint64_t n = 0;
  double alpha = 0.0;
  double mean_err_sq = 0.0;
  double se_err_sq = 0.0;
  double mean_f_gap = 0.0;
  double se_f_gap = 0.0;
  std::uint64_t n_paths = 0;  // paths still alive at this row
};

struct RunResult {
  std::vector<RunTrace> paths;
  std::vector<AggregateRow> aggregate;
  ParamVector w1;
  ParamVector w_star;         // empty when no reference point is known
  double f_star = 0.0;
  ProblemConstants constants;
  std::uint64_t diverged_paths = 0;
  // Worst pathwise-bound slack over all tamed paths (checked on the fly);
  // 0 when not applicable (plain-gradient runs or no reference point).
  double worst_pathwise_slack = 0.0;
};

// Runs n_paths independent sample paths (path p uses the random stream
// (seed, p), so results do not depend on thread scheduling) and aggregates
// the recorded rows. Thread count comes from the TSGD_THREADS environment
// variable, defaulting to the hardware concurrency.
RunResult run_paths(const ExperimentConfig& cfg);

// Least-squares slope of log(mean_err_sq) against log(n) over recorded rows
// with n in [n_min, n_max]. Requires at least 10 rows in range, all with
// positive means.
double fit_rate(std::span<const AggregateRow> aggregate, double n_min, double n_max);
double fit_rate_points(std::span<const double> ns, std::span<const double> means);

struct SweepRow {
  double gamma = 0.0;
  Method optimizer = Method::tsgd;
  double final_err = 0.0;
  double max_err = 0.0;
  bool diverged = false;
};

// Re-runs the base configuration for each gamma and each optimizer,
// reporting final/max mean squared error and the divergence flag. The base
// schedule must be harmonic.
std::vector<SweepRow> gamma_sweep(const ExperimentConfig& base, std::span<const double> gammas);

// CSV with header "n,alpha,mean_err_sq,se_err_sq,mean_f_gap,se_f_gap",
// values at 17 significant digits, LF endings.
std::string aggregate_csv(std::span<const AggregateRow> rows);
std::vector<AggregateRow> parse_aggregate_csv(const std::string& text);

// CSV with header "gamma,optimizer,final_err,max_err,diverged".
std::string sweep_csv(std::span<const SweepRow> rows);

void emit_csv(std::span<const AggregateRow> rows, const std::string& path);
void emit_csv(std::span<const SweepRow> rows, const std::string& path);

}  // namespace tsgd
