// Command line front end: run experiments, sweep schedule offsets, fit decay
// rates from emitted CSV, and re-check the library's analytic guarantees.
//
// Exit codes: 0 success, 1 validation or I/O error, 2 a verification check failed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsgd/experiment.hpp"
#include "tsgd/steps.hpp"
#include "tsgd/theory.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheckFailed = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

tsgd::ExperimentConfig load_config(const std::string& path) {
  return tsgd::ExperimentConfig::from_json_text(read_file(path));
}

int cmd_run(const std::string& config_path, const std::string& output_override) {
  tsgd::ExperimentConfig cfg = load_config(config_path);
  if (!output_override.empty()) cfg.output = output_override;
  const tsgd::RunResult result = tsgd::run_paths(cfg);
  const std::string csv = tsgd::aggregate_csv(result.aggregate);
  if (cfg.output.empty()) {
    std::cout << csv;
  } else {
    tsgd::emit_csv(std::span<const tsgd::AggregateRow>(result.aggregate), cfg.output);
    std::cout << "wrote " << result.aggregate.size() << " rows to " << cfg.output << "\n";
  }
  std::cerr << tsgd::method_name(cfg.optimizer) << ": " << cfg.n_paths << " paths, "
            << cfg.n_steps << " steps, " << result.diverged_paths << " diverged\n";
  if (cfg.optimizer == tsgd::Method::tsgd) {
    std::cerr << "worst pathwise bound slack: " << result.worst_pathwise_slack << "\n";
  }
  return kExitOk;
}

std::vector<double> parse_gamma_list(const std::string& text) {
  std::vector<double> gammas;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    const double g = std::stod(tok, &used);
    if (used != tok.size()) throw std::runtime_error("bad gamma value '" + tok + "'");
    gammas.push_back(g);
  }
  if (gammas.empty()) throw std::runtime_error("--gammas needs at least one value");
  return gammas;
}

int cmd_sweep(const std::string& config_path, const std::string& gammas_text,
              const std::string& output_override) {
  tsgd::ExperimentConfig cfg = load_config(config_path);
  if (!output_override.empty()) cfg.output = output_override;
  const std::vector<double> gammas = parse_gamma_list(gammas_text);
  const std::vector<tsgd::SweepRow> table = tsgd::gamma_sweep(cfg, gammas);
  const std::string csv = tsgd::sweep_csv(table);
  if (cfg.output.empty()) {
    std::cout << csv;
  } else {
    tsgd::emit_csv(std::span<const tsgd::SweepRow>(table), cfg.output);
    std::cout << "wrote " << table.size() << " rows to " << cfg.output << "\n";
  }
  return kExitOk;
}

int cmd_rate(const std::string& csv_path, double from, double to) {
  const std::vector<tsgd::AggregateRow> rows = tsgd::parse_aggregate_csv(read_file(csv_path));
  const double slope = tsgd::fit_rate(rows, from, to);
  std::printf("slope %.6f over n in [%g, %g]\n", slope, from, to);
  return kExitOk;
}

// ---- verify: re-run the analytic guarantees at desk scale ----

struct CheckReport {
  int failures = 0;

  void note(const std::string& name, bool ok, const std::string& detail = "") {
    if (ok) {
      std::cout << "PASS " << name << "\n";
    } else {
      ++failures;
      std::cout << "FAIL " << name << (detail.empty() ? "" : ": " + detail) << "\n";
    }
  }
};

void check_taming_sandwich(CheckReport& report, std::uint64_t seed) {
  tsgd::RngStream rng(seed, 1);
  bool ok = true;
  std::string detail;
  for (int i = 0; i < 20000 && ok; ++i) {
    const double alpha = std::pow(10.0, -8.0 + 16.0 * rng.next_unit());
    const double gnorm = std::pow(10.0, -8.0 + 16.0 * rng.next_unit());
    const double t = alpha * gnorm;
    const double f = tsgd::taming_factor(alpha, gnorm);
    const double clip = std::min(1.0, t);
    if (!(f >= 0.5 * clip && f <= clip && f < 1.0)) {
      ok = false;
      detail = "violated at alpha=" + std::to_string(alpha) + " |g|=" + std::to_string(gnorm);
    }
  }
  report.note("taming-sandwich", ok, detail);
}

void check_step_identity(CheckReport& report, std::uint64_t seed) {
  tsgd::RngStream rng(seed, 2);
  bool ok = true;
  std::string detail;
  for (int trial = 0; trial < 2000 && ok; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(rng.next_below(8));
    tsgd::ParamVector diag(d);
    tsgd::ParamVector target(d);
    tsgd::ParamVector w(d);
    tsgd::ParamVector z(d);
    for (std::size_t i = 0; i < d; ++i) {
      diag[i] = 0.1 + 5.0 * rng.next_unit();
      target[i] = rng.next_gaussian();
      w[i] = 2.0 * rng.next_gaussian();
      z[i] = 2.0 * rng.next_gaussian();
    }
    const tsgd::QuadraticProblem problem(diag, target, 0.0,
                                         tsgd::QuadraticProblem::NoiseKind::gaussian);
    const double alpha = std::pow(10.0, -4.0 + 8.0 * rng.next_unit());
    const double xi = std::pow(10.0, -4.0 + 8.0 * rng.next_unit());
    const tsgd::ParamVector grad_w = problem.full_gradient(w);
    const double grad_z_norm = tsgd::vec_norm(problem.full_gradient(z));
    const double gap = tsgd::tamed_map_identity_gap(alpha, xi, grad_w, grad_z_norm, w);
    const double scale = std::max(1.0, tsgd::vec_norm(grad_w));
    if (!(gap <= 1e-10 * scale)) {
      ok = false;
      detail = "gap " + std::to_string(gap) + " exceeds tolerance";
    }
  }
  report.note("tamed-step-identity", ok, detail);
}

void check_perturbation_split(CheckReport& report, std::uint64_t seed) {
  tsgd::RngStream rng(seed, 3);
  bool ok = true;
  std::string detail;
  for (int trial = 0; trial < 5000 && ok; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(rng.next_below(6));
    tsgd::ParamVector g(d);
    for (double& x : g) x = 3.0 * rng.next_gaussian();
    const double alpha = std::pow(10.0, -6.0 + 12.0 * rng.next_unit());
    const auto [explicit_part, remainder] = tsgd::perturbation_decomposition(alpha, g);
    const double gnorm = tsgd::vec_norm(g);
    tsgd::ParamVector recombined(d);
    const double denom = 1.0 + alpha * gnorm;
    for (std::size_t i = 0; i < d; ++i) recombined[i] = explicit_part[i] - remainder[i];
    for (std::size_t i = 0; i < d; ++i) {
      const double direct = alpha * g[i] / denom;
      // The recombination subtracts two possibly huge terms, so rounding
      // scales with the terms, not with the O(1) result.
      const double scale =
          std::max({1.0, std::abs(explicit_part[i]), std::abs(remainder[i])});
      if (std::abs(recombined[i] - direct) > 1e-12 * scale) {
        ok = false;
        detail = "recombination mismatch";
      }
    }
    if (tsgd::vec_norm(remainder) > alpha * alpha * gnorm * gnorm * (1.0 + 1e-12)) {
      ok = false;
      detail = "remainder norm above quadratic cap";
    }
  }
  report.note("step-perturbation-split", ok, detail);
}

tsgd::RunResult verify_reference_run(std::uint64_t seed) {
  tsgd::ExperimentConfig cfg;
  cfg.problem.kind = tsgd::ProblemSpec::Kind::quadratic;
  cfg.problem.dim = 5;
  cfg.problem.diag_log_spaced = true;
  cfg.problem.diag_log_min = 1.0;
  cfg.problem.diag_log_max = 10.0;
  cfg.problem.target_is_fill = true;
  cfg.problem.target_fill = 1.0;
  cfg.problem.noise_sigma = 1.0;
  cfg.schedule = tsgd::StepSchedule::harmonic(2.0, 1.0);
  cfg.optimizer = tsgd::Method::tsgd;
  cfg.n_steps = 2000;
  cfg.n_paths = 40;
  cfg.record_every = 10;
  cfg.seed = seed;
  cfg.init.kind = tsgd::InitSpec::Kind::fill;
  cfg.init.fill = 0.0;
  return tsgd::run_paths(cfg);
}

void check_pathwise_bound(CheckReport& report, const tsgd::RunResult& run) {
  const bool ok = run.worst_pathwise_slack <= 1e-9;
  report.note("pathwise-error-bound", ok,
              "worst slack " + std::to_string(run.worst_pathwise_slack));
}

void check_envelope_domination(CheckReport& report, const tsgd::RunResult& run) {
  const double theta = 2.0;
  const double gamma = 1.0;
  const tsgd::ErrorMoments moments = tsgd::estimate_error_moments(run.paths);
  const tsgd::ProblemConstants& pc = run.constants;
  const double k = tsgd::envelope_k(theta, pc.lip, pc.mu2, pc.sigma, moments.m2, moments.m4);
  const double init_err_sq = tsgd::vec_dist(run.w1, run.w_star) * tsgd::vec_dist(run.w1, run.w_star);
  bool ok = true;
  std::string detail;
  for (const tsgd::AggregateRow& row : run.aggregate) {
    if (row.n < 20) continue;
    const double bound =
        tsgd::harmonic_envelope(row.n, theta, gamma, pc.mu, k, init_err_sq);
    if (!(bound >= row.mean_err_sq + 3.0 * row.se_err_sq)) {
      ok = false;
      detail = "violated at n=" + std::to_string(row.n);
      break;
    }
  }
  report.note("decay-envelope-domination", ok, detail);
}

void check_gap_sandwich(CheckReport& report, const tsgd::RunResult& run) {
  const tsgd::ProblemConstants& pc = run.constants;
  bool ok = true;
  std::string detail;
  for (const tsgd::RunTrace& trace : run.paths) {
    for (const tsgd::TraceRow& row : trace.rows) {
      const auto [upper_slack, lower_slack] = tsgd::objective_gap_sandwich(
          row.f_value, run.f_star, row.err_sq, pc.mu, pc.lip);
      const double scale = std::max({1.0, std::abs(row.f_value), std::abs(run.f_star)});
      if (upper_slack < -1e-9 * scale || lower_slack < -1e-9 * scale) {
        ok = false;
        detail = "violated at n=" + std::to_string(row.n);
        break;
      }
    }
    if (!ok) break;
  }
  report.note("objective-gap-sandwich", ok, detail);
}

void check_product_bound(CheckReport& report) {
  bool ok = true;
  std::string detail;
  for (const double y : {0.1, 1.0, 5.0, 10.0}) {
    for (int xi = 1; xi <= 10 && ok; ++xi) {
      const double x = 0.1 + (static_cast<double>(xi) - 1.0) / 9.0 * (1.0 + y - 0.1);
      for (const std::uint64_t n : {1ull, 7ull, 50ull, 300ull}) {
        for (const std::uint64_t m : {std::uint64_t{1}, (n + 1) / 2, n + 1}) {
          if (m < 1) continue;
          const auto [value, bound] = tsgd::harmonic_product_bound(x, y, m, n);
          if (!(value <= bound * (1.0 + 1e-12))) {
            ok = false;
            detail = "violated at x=" + std::to_string(x) + " y=" + std::to_string(y);
            break;
          }
        }
      }
    }
  }
  report.note("harmonic-product-bound", ok, detail);
}

void check_sum_bound(CheckReport& report) {
  bool ok = true;
  std::string detail;
  for (const double y : {0.1, 1.0, 5.0, 10.0}) {
    for (int xi = 1; xi <= 10 && ok; ++xi) {
      const double x = 0.1 + (static_cast<double>(xi) - 1.0) / 9.0 * (1.0 + y - 0.1);
      for (const std::uint64_t n : {2ull, 10ull, 100ull, 300ull}) {
        const auto [value, bound] = tsgd::harmonic_sum_bound(x, y, n);
        if (!(value <= bound * (1.0 + 1e-12))) {
          ok = false;
          detail = "violated at x=" + std::to_string(x) + " y=" + std::to_string(y) +
                   " n=" + std::to_string(n);
          break;
        }
      }
    }
  }
  report.note("harmonic-sum-bound", ok, detail);
}

void check_tangent_bound(CheckReport& report) {
  bool ok = true;
  std::string detail;
  for (int ia = 0; ia < 10 && ok; ++ia) {
    for (int ib = 0; ib < 10 && ok; ++ib) {
      for (int ix = 0; ix < 10; ++ix) {
        const double a = std::pow(10.0, -3.0 + 6.0 * ia / 9.0);
        const double b = std::pow(10.0, -3.0 + 6.0 * ib / 9.0);
        const double x = std::pow(10.0, -3.0 + 6.0 * ix / 9.0);
        const auto [value, bound] = tsgd::tangent_line_bound(a, b, x);
        if (!(value <= bound + 1e-12 * std::max(1.0, std::abs(bound)))) {
          ok = false;
          detail = "violated at a=" + std::to_string(a) + " b=" + std::to_string(b);
          break;
        }
      }
    }
  }
  report.note("tangent-line-bound", ok, detail);
}

void check_envelope_monotone(CheckReport& report) {
  bool ok = true;
  std::string detail;
  const double k = 2.0;
  const double init = 4.0;
  const struct {
    double x, y;
  } grid[] = {{1.5, 0.0}, {2.0, 1.0}, {4.0, 1.0}, {1.0, 1.0}, {1.0, 5.0}, {3.0, 10.0}};
  for (const auto& [x, y] : grid) {
    double prev = tsgd::decay_envelope(1, x, y, k, init);
    for (std::uint64_t n = 2; n <= 400; ++n) {
      const double cur = tsgd::decay_envelope(n, x, y, k, init);
      if (cur > prev * (1.0 + 1e-12)) {
        ok = false;
        detail = "increase at n=" + std::to_string(n) + " for x=" + std::to_string(x) +
                 " y=" + std::to_string(y);
        break;
      }
      prev = cur;
    }
    if (!ok) break;
  }
  report.note("decay-envelope-monotone", ok, detail);
}

void check_finite_sum_identity(CheckReport& report, std::uint64_t seed) {
  // Small synthetic two-feature dataset, exercised with several partitions.
  const char* text =
      "+1 1:0.5 2:1.25\n"
      "-1 1:-0.75 2:0.3\n"
      "+1 2:2.0\n"
      "-1 1:1.5 2:-0.5\n"
      "+1 1:-0.25\n"
      "-1 1:0.1 2:0.9\n";
  tsgd::LogisticProblem problem(tsgd::parse_libsvm(text), 0.05, 2, true);
  tsgd::RngStream rng(seed, 4);
  tsgd::ParamVector w(problem.dimension());
  for (double& x : w) x = rng.next_gaussian();

  bool ok = true;
  std::string detail;
  const std::vector<std::vector<std::size_t>> partitions[] = {
      {{0, 1}, {2, 3}, {4, 5}},
      {{0, 1, 2, 3, 4, 5}},
      {{5}, {0, 4}, {1, 2, 3}},
  };
  for (const auto& partition : partitions) {
    const double gap = tsgd::finite_sum_gradient_identity(problem, w, partition);
    const double scale = std::max(1.0, tsgd::vec_norm(problem.full_gradient(w)));
    if (!(gap <= 1e-12 * scale)) {
      ok = false;
      detail = "discrepancy " + std::to_string(gap);
      break;
    }
  }
  report.note("finite-sum-gradient-identity", ok, detail);
}

int cmd_verify(std::uint64_t seed) {
  CheckReport report;
  check_taming_sandwich(report, seed);
  check_step_identity(report, seed);
  check_perturbation_split(report, seed);
  const tsgd::RunResult run = verify_reference_run(seed);
  check_pathwise_bound(report, run);
  check_envelope_domination(report, run);
  check_gap_sandwich(report, run);
  check_product_bound(report);
  check_sum_bound(report);
  check_tangent_bound(report);
  check_envelope_monotone(report);
  check_finite_sum_identity(report, seed);
  if (report.failures > 0) {
    std::cout << report.failures << " check(s) failed\n";
    return kExitCheckFailed;
  }
  std::cout << "all checks passed\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tamed stochastic gradient descent experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  std::string gammas_text;
  std::string csv_path;
  double rate_from = 0.0;
  double rate_to = 0.0;
  std::uint64_t verify_seed = 20250815;

  CLI::App* run = app.add_subcommand("run", "run one experiment and emit aggregate CSV");
  run->add_option("config", config_path, "experiment config JSON")->required();
  run->add_option("--output", output_override, "write CSV here instead of the config's output");

  CLI::App* sweep = app.add_subcommand("sweep", "sweep the schedule offset for both optimizers");
  sweep->add_option("config", config_path, "experiment config JSON")->required();
  sweep->add_option("--gammas", gammas_text, "comma separated offsets")->required();
  sweep->add_option("--output", output_override, "write CSV here instead of the config's output");

  CLI::App* verify = app.add_subcommand("verify", "re-check the analytic guarantees");
  verify->add_option("--seed", verify_seed, "seed for the randomized checks");

  CLI::App* rate = app.add_subcommand("rate", "fit a log-log decay slope from aggregate CSV");
  rate->add_option("csv", csv_path, "aggregate CSV emitted by run")->required();
  rate->add_option("--from", rate_from, "smallest n included")->required();
  rate->add_option("--to", rate_to, "largest n included")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, output_override);
    if (sweep->parsed()) return cmd_sweep(config_path, gammas_text, output_override);
    if (verify->parsed()) return cmd_verify(verify_seed);
    if (rate->parsed()) return cmd_rate(csv_path, rate_from, rate_to);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
