#include "tsgd/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <thread>

#include <json.hpp>

#include "tsgd/batcher.hpp"
#include "tsgd/steps.hpp"
#include "tsgd/theory.hpp"

namespace tsgd {

using nlohmann::json;

const char* method_name(Method m) { return m == Method::tsgd ? "tsgd" : "sgd"; }

std::unique_ptr<StochasticGradientOracle> ProblemSpec::build() const {
  switch (kind) {
    case Kind::quadratic: {
      std::vector<double> eigen = diag;
      if (eigen.empty()) {
        if (!diag_log_spaced) {
          throw std::invalid_argument("quadratic problem needs diag or diag_log_spaced");
        }
        if (dim == 0) throw std::invalid_argument("quadratic with diag_log_spaced needs dim");
        if (!(diag_log_min > 0.0) || !(diag_log_max >= diag_log_min)) {
          throw std::invalid_argument("diag_log_spaced needs 0 < min <= max");
        }
        eigen.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) {
          const double t = dim == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(dim - 1);
          eigen[i] = diag_log_min * std::pow(diag_log_max / diag_log_min, t);
        }
      } else if (dim != 0 && dim != eigen.size()) {
        throw std::invalid_argument("quadratic dim does not match diag length");
      }
      ParamVector t = target_is_fill ? ParamVector(eigen.size(), target_fill) : target;
      return std::make_unique<QuadraticProblem>(std::move(eigen), std::move(t), noise_sigma,
                                                noise_kind);
    }
    case Kind::logistic: {
      SparseDataset ds = data_inline.empty() ? load_libsvm_file(data_path)
                                             : parse_libsvm(data_inline);
      return std::make_unique<LogisticProblem>(std::move(ds), reg, batch_size, with_bias);
    }
    case Kind::mlp: {
      SparseDataset ds = data_inline.empty() ? load_libsvm_file(data_path)
                                             : parse_libsvm(data_inline);
      return std::make_unique<MlpProblem>(std::move(ds), hidden_width, reg, batch_size);
    }
  }
  throw std::logic_error("unreachable problem kind");
}

ParamVector InitSpec::resolve(std::size_t dim, std::uint64_t seed) const {
  switch (kind) {
    case Kind::fill:
      return ParamVector(dim, fill);
    case Kind::vector:
      if (values.size() != dim) {
        throw std::invalid_argument("init vector dimension does not match the problem");
      }
      return values;
    case Kind::gaussian: {
      RngStream rng(seed, kInitStream);
      ParamVector w(dim);
      for (double& x : w) x = gaussian_scale * rng.next_gaussian();
      return w;
    }
  }
  throw std::logic_error("unreachable init kind");
}

void ExperimentConfig::validate() const {
  if (n_steps < 1) throw std::invalid_argument("config: n_steps must be >= 1");
  if (n_paths < 1) throw std::invalid_argument("config: n_paths must be >= 1");
  if (record_every < 1) throw std::invalid_argument("config: record_every must be >= 1");
  if (schedule.kind == StepSchedule::Kind::harmonic) {
    if (!(schedule.theta > 0.0)) throw std::invalid_argument("config: theta must be positive");
    if (!(schedule.gamma >= 0.0)) throw std::invalid_argument("config: gamma must be nonnegative");
  } else if (!(schedule.value > 0.0)) {
    throw std::invalid_argument("config: constant step must be positive");
  }
}

namespace {

[[noreturn]] void config_fail(const std::string& what) {
  throw std::runtime_error("config: " + what);
}

ProblemSpec problem_from_json(const json& j) {
  ProblemSpec p;
  const std::string kind = j.value("kind", "");
  if (kind == "quadratic") {
    p.kind = ProblemSpec::Kind::quadratic;
    p.dim = j.value("dim", std::size_t{0});
    if (j.contains("diag")) p.diag = j.at("diag").get<std::vector<double>>();
    if (j.contains("diag_log_spaced")) {
      const auto range = j.at("diag_log_spaced").get<std::vector<double>>();
      if (range.size() != 2) config_fail("diag_log_spaced must be [min, max]");
      p.diag_log_spaced = true;
      p.diag_log_min = range[0];
      p.diag_log_max = range[1];
    }
    if (j.contains("target")) {
      const json& t = j.at("target");
      if (t.is_number()) {
        p.target_is_fill = true;
        p.target_fill = t.get<double>();
      } else {
        p.target_is_fill = false;
        p.target = t.get<std::vector<double>>();
      }
    }
    p.noise_sigma = j.value("noise_sigma", 0.0);
    const std::string nk = j.value("noise_kind", "gaussian");
    if (nk == "gaussian") {
      p.noise_kind = QuadraticProblem::NoiseKind::gaussian;
    } else if (nk == "bounded_uniform") {
      p.noise_kind = QuadraticProblem::NoiseKind::bounded_uniform;
    } else {
      config_fail("unknown noise_kind '" + nk + "'");
    }
  } else if (kind == "logistic" || kind == "mlp") {
    p.kind = kind == "logistic" ? ProblemSpec::Kind::logistic : ProblemSpec::Kind::mlp;
    p.data_path = j.value("data", "");
    p.data_inline = j.value("data_inline", "");
    if (p.data_path.empty() && p.data_inline.empty()) {
      config_fail(kind + " problem needs data or data_inline");
    }
    p.reg = j.value("reg", 0.0);
    p.batch_size = j.value("batch_size", std::size_t{0});
    p.with_bias = j.value("bias", true);
    p.hidden_width = j.value("hidden_width", std::size_t{0});
    if (p.kind == ProblemSpec::Kind::mlp && p.hidden_width == 0) {
      config_fail("mlp problem needs hidden_width >= 1");
    }
  } else {
    config_fail("unknown problem kind '" + kind + "'");
  }
  return p;
}

json problem_to_json(const ProblemSpec& p) {
  json j;
  switch (p.kind) {
    case ProblemSpec::Kind::quadratic:
      j["kind"] = "quadratic";
      if (p.dim != 0) j["dim"] = p.dim;
      if (!p.diag.empty()) j["diag"] = p.diag;
      if (p.diag_log_spaced) j["diag_log_spaced"] = {p.diag_log_min, p.diag_log_max};
      if (p.target_is_fill) {
        j["target"] = p.target_fill;
      } else {
        j["target"] = p.target;
      }
      j["noise_sigma"] = p.noise_sigma;
      j["noise_kind"] =
          p.noise_kind == QuadraticProblem::NoiseKind::gaussian ? "gaussian" : "bounded_uniform";
      break;
    case ProblemSpec::Kind::logistic:
    case ProblemSpec::Kind::mlp:
      j["kind"] = p.kind == ProblemSpec::Kind::logistic ? "logistic" : "mlp";
      if (!p.data_path.empty()) j["data"] = p.data_path;
      if (!p.data_inline.empty()) j["data_inline"] = p.data_inline;
      j["reg"] = p.reg;
      j["batch_size"] = p.batch_size;
      j["bias"] = p.with_bias;
      if (p.kind == ProblemSpec::Kind::mlp) j["hidden_width"] = p.hidden_width;
      break;
  }
  return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    config_fail(std::string("invalid JSON: ") + e.what());
  }
  try {
    ExperimentConfig cfg;
    cfg.problem = problem_from_json(j.at("problem"));

    const json& s = j.at("schedule");
    const std::string sk = s.value("kind", "harmonic");
    if (sk == "harmonic") {
      cfg.schedule = StepSchedule::harmonic(s.at("theta").get<double>(), s.value("gamma", 0.0));
    } else if (sk == "constant") {
      cfg.schedule = StepSchedule::constant(s.at("value").get<double>());
    } else {
      config_fail("unknown schedule kind '" + sk + "'");
    }

    const std::string opt = j.value("optimizer", "tsgd");
    if (opt == "tsgd") {
      cfg.optimizer = Method::tsgd;
    } else if (opt == "sgd") {
      cfg.optimizer = Method::sgd;
    } else {
      config_fail("unknown optimizer '" + opt + "'");
    }

    cfg.n_steps = j.at("n_steps").get<std::uint64_t>();
    cfg.n_paths = j.value("n_paths", std::uint64_t{1});
    cfg.record_every = j.value("record_every", std::uint64_t{10});
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.reference_budget = j.value("reference_budget", std::uint64_t{0});
    cfg.output = j.value("output", "");

    if (j.contains("init")) {
      const json& init = j.at("init");
      if (init.is_number()) {
        cfg.init.kind = InitSpec::Kind::fill;
        cfg.init.fill = init.get<double>();
      } else if (init.is_array()) {
        cfg.init.kind = InitSpec::Kind::vector;
        cfg.init.values = init.get<std::vector<double>>();
      } else if (init.is_object() && init.contains("gaussian_scale")) {
        cfg.init.kind = InitSpec::Kind::gaussian;
        cfg.init.gaussian_scale = init.at("gaussian_scale").get<double>();
      } else {
        config_fail("init must be a number, an array, or {\"gaussian_scale\": s}");
      }
    }

    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    config_fail(std::string("missing or ill-typed field: ") + e.what());
  }
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["problem"] = problem_to_json(problem);
  if (schedule.kind == StepSchedule::Kind::harmonic) {
    j["schedule"] = {{"kind", "harmonic"}, {"theta", schedule.theta}, {"gamma", schedule.gamma}};
  } else {
    j["schedule"] = {{"kind", "constant"}, {"value", schedule.value}};
  }
  j["optimizer"] = method_name(optimizer);
  j["n_steps"] = n_steps;
  j["n_paths"] = n_paths;
  j["record_every"] = record_every;
  j["seed"] = seed;
  switch (init.kind) {
    case InitSpec::Kind::fill:
      j["init"] = init.fill;
      break;
    case InitSpec::Kind::vector:
      j["init"] = init.values;
      break;
    case InitSpec::Kind::gaussian:
      j["init"] = {{"gaussian_scale", init.gaussian_scale}};
      break;
  }
  if (reference_budget != 0) j["reference_budget"] = reference_budget;
  if (!output.empty()) j["output"] = output;
  return j.dump(2) + "\n";
}

namespace {

double dist_sq(const ParamVector& a, const ParamVector& b) {
  const double d = vec_dist(a, b);
  return d * d;
}

RunTrace run_single_path(const StochasticGradientOracle& problem, const ExperimentConfig& cfg,
                         const ParamVector& w1, const ParamVector& w_star,
                         std::uint64_t path_index) {
  const bool tamed = cfg.optimizer == Method::tsgd;
  RngStream rng(cfg.seed, path_index);
  std::optional<EpochBatcher> batcher;
  if (problem.sample_count() > 0) {
    batcher.emplace(problem.sample_count(), problem.batch_size(), RngStream(cfg.seed, path_index));
  }

  ParamVector w = w1;
  RunTrace trace;
  trace.rows.reserve(static_cast<std::size_t>(cfg.n_steps / cfg.record_every) + 2);
  double cum_tamed = 0.0;
  double prev_step = 0.0;
  double prev_gnorm = 0.0;

  const auto record = [&](std::uint64_t n) {
    TraceRow row;
    row.n = n;
    row.alpha = schedule_value(cfg.schedule, n);
    row.err_sq = w_star.empty() ? std::numeric_limits<double>::quiet_NaN() : dist_sq(w, w_star);
    row.f_value = problem.objective(w);
    row.step_len = prev_step;
    row.grad_norm = prev_gnorm;
    row.cum_tamed = cum_tamed;
    trace.rows.push_back(row);
  };

  Draw draw;
  for (std::uint64_t n = 1; n <= cfg.n_steps; ++n) {
    if ((n - 1) % cfg.record_every == 0) record(n);
    if (batcher) {
      draw.batch = batcher->next_batch();
    } else {
      draw = problem.sample_draw(rng);
    }
    const ParamVector g = problem.gradient_at(draw, w);
    const double alpha = schedule_value(cfg.schedule, n);
    const double gnorm = vec_norm(g);
    if (tamed) {
      detail::tamed_update(w, g, alpha, gnorm);
      prev_step = taming_factor(alpha, gnorm);
    } else {
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= alpha * g[i];
      prev_step = alpha * gnorm;
    }
    cum_tamed += std::min(1.0, alpha * gnorm);
    prev_gnorm = gnorm;

    bool tripped = false;
    for (double x : w) {
      if (!(std::abs(x) <= kDivergenceGuard)) {  // also catches NaN
        tripped = true;
        break;
      }
    }
    if (tripped) {
      trace.diverged = true;
      trace.divergence_step = n;
      record(n + 1);
      return trace;
    }
  }
  record(cfg.n_steps + 1);
  return trace;
}

std::uint64_t thread_count(std::uint64_t n_paths) {
  std::uint64_t n = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("TSGD_THREADS")) {
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || parsed == 0) {
      throw std::runtime_error("TSGD_THREADS must be a positive integer");
    }
    n = parsed;
  }
  if (n == 0) n = 1;
  return std::min<std::uint64_t>(n, n_paths);
}

}  // namespace

RunResult run_paths(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::unique_ptr<StochasticGradientOracle> problem = cfg.problem.build();

  RunResult result;
  if (const auto* q = dynamic_cast<const QuadraticProblem*>(problem.get())) {
    result.w_star = q->minimizer();
    result.f_star = q->minimum_value();
    result.constants = quadratic_constants(*q);
  } else {
    const std::uint64_t budget =
        cfg.reference_budget != 0 ? cfg.reference_budget : 2 * cfg.n_steps + 1000;
    ReferenceSolution ref = reference_solution(*problem, budget, cfg.seed);
    result.w_star = std::move(ref.w);
    result.f_star = ref.f;
    if (const auto* lp = dynamic_cast<const LogisticProblem*>(problem.get())) {
      result.constants = lp->constants(result.w_star);
    }
  }
  result.w1 = cfg.init.resolve(problem->dimension(), cfg.seed);

  result.paths.resize(cfg.n_paths);
  const std::uint64_t workers = thread_count(cfg.n_paths);
  if (workers <= 1) {
    for (std::uint64_t p = 0; p < cfg.n_paths; ++p) {
      result.paths[p] = run_single_path(*problem, cfg, result.w1, result.w_star, p);
    }
  } else {
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
      try {
        for (;;) {
          const std::uint64_t p = next.fetch_add(1);
          if (p >= cfg.n_paths) return;
          result.paths[p] = run_single_path(*problem, cfg, result.w1, result.w_star, p);
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint64_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  // Aggregate over the recording grid, merging in path-index order.
  std::vector<std::uint64_t> grid;
  for (std::uint64_t n = 1; n <= cfg.n_steps; n += cfg.record_every) grid.push_back(n);
  grid.push_back(cfg.n_steps + 1);

  std::vector<std::size_t> cursor(cfg.n_paths, 0);
  std::vector<double> errs;
  std::vector<double> fs;
  errs.reserve(cfg.n_paths);
  fs.reserve(cfg.n_paths);
  for (const std::uint64_t n : grid) {
    errs.clear();
    fs.clear();
    for (std::uint64_t p = 0; p < cfg.n_paths; ++p) {
      auto& c = cursor[p];
      const auto& rows = result.paths[p].rows;
      while (c < rows.size() && rows[c].n < n) ++c;
      if (c < rows.size() && rows[c].n == n) {
        errs.push_back(rows[c].err_sq);
        fs.push_back(rows[c].f_value);
      }
    }
    if (errs.empty()) continue;
    AggregateRow row;
    row.n = n;
    row.alpha = schedule_value(cfg.schedule, n);
    row.n_paths = errs.size();
    const double count = static_cast<double>(errs.size());
    double mean_e = 0.0;
    double mean_f = 0.0;
    for (std::size_t i = 0; i < errs.size(); ++i) {
      mean_e += errs[i];
      mean_f += fs[i];
    }
    mean_e /= count;
    mean_f /= count;
    double var_e = 0.0;
    double var_f = 0.0;
    if (errs.size() > 1) {
      for (std::size_t i = 0; i < errs.size(); ++i) {
        var_e += (errs[i] - mean_e) * (errs[i] - mean_e);
        var_f += (fs[i] - mean_f) * (fs[i] - mean_f);
      }
      var_e /= count - 1.0;
      var_f /= count - 1.0;
    }
    row.mean_err_sq = mean_e;
    row.se_err_sq = std::sqrt(var_e / count);
    row.mean_f_gap = mean_f - result.f_star;
    row.se_f_gap = std::sqrt(var_f / count);
    result.aggregate.push_back(row);
  }

  for (const RunTrace& t : result.paths) {
    if (t.diverged) ++result.diverged_paths;
  }
  if (cfg.optimizer == Method::tsgd && !result.w_star.empty()) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const RunTrace& t : result.paths) {
      worst = std::max(worst, pathwise_bound_slack(t, result.w_star, result.w1));
    }
    result.worst_pathwise_slack = worst;
  }
  return result;
}

double fit_rate_points(std::span<const double> ns, std::span<const double> means) {
  if (ns.size() != means.size()) {
    throw std::invalid_argument("fit_rate: mismatched point arrays");
  }
  if (ns.size() < 10) {
    throw std::invalid_argument("fit_rate: need at least 10 recorded points in range");
  }
  std::vector<double> lx;
  std::vector<double> ly;
  lx.reserve(ns.size());
  ly.reserve(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(ns[i] > 0.0)) throw std::invalid_argument("fit_rate: n values must be positive");
    if (!(means[i] > 0.0)) {
      throw std::invalid_argument("fit_rate: non-positive mean in the fit range");
    }
    lx.push_back(std::log(ns[i]));
    ly.push_back(std::log(means[i]));
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(lx.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: degenerate n range");
  return sxy / sxx;
}

double fit_rate(std::span<const AggregateRow> aggregate, double n_min, double n_max) {
  std::vector<double> ns;
  std::vector<double> means;
  for (const AggregateRow& row : aggregate) {
    const double n = static_cast<double>(row.n);
    if (n < n_min || n > n_max) continue;
    ns.push_back(n);
    means.push_back(row.mean_err_sq);
  }
  return fit_rate_points(ns, means);
}

std::vector<SweepRow> gamma_sweep(const ExperimentConfig& base, std::span<const double> gammas) {
  if (gammas.empty()) throw std::invalid_argument("gamma_sweep: empty gamma list");
  if (base.schedule.kind != StepSchedule::Kind::harmonic) {
    throw std::invalid_argument("gamma_sweep: base schedule must be harmonic");
  }
  std::vector<SweepRow> table;
  table.reserve(gammas.size() * 2);
  for (const double gamma : gammas) {
    for (const Method method : {Method::tsgd, Method::sgd}) {
      ExperimentConfig cfg = base;
      cfg.schedule = StepSchedule::harmonic(base.schedule.theta, gamma);
      cfg.optimizer = method;
      const RunResult res = run_paths(cfg);
      SweepRow row;
      row.gamma = gamma;
      row.optimizer = method;
      if (!res.aggregate.empty()) {
        row.final_err = res.aggregate.back().mean_err_sq;
        for (const AggregateRow& a : res.aggregate) {
          row.max_err = std::max(row.max_err, a.mean_err_sq);
        }
      }
      row.diverged = res.diverged_paths > 0;
      table.push_back(row);
    }
  }
  return table;
}

namespace {

void append_g17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("error writing '" + path + "'");
}

}  // namespace

std::string aggregate_csv(std::span<const AggregateRow> rows) {
  std::string out = "n,alpha,mean_err_sq,se_err_sq,mean_f_gap,se_f_gap\n";
  for (const AggregateRow& r : rows) {
    out += std::to_string(r.n);
    out += ',';
    append_g17(out, r.alpha);
    out += ',';
    append_g17(out, r.mean_err_sq);
    out += ',';
    append_g17(out, r.se_err_sq);
    out += ',';
    append_g17(out, r.mean_f_gap);
    out += ',';
    append_g17(out, r.se_f_gap);
    out += '\n';
  }
  return out;
}

std::vector<AggregateRow> parse_aggregate_csv(const std::string& text) {
  std::vector<AggregateRow> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line(text.data() + pos,
                                (nl == std::string::npos ? text.size() : nl) - pos);
    pos = (nl == std::string::npos) ? text.size() : nl + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "n,alpha,mean_err_sq,se_err_sq,mean_f_gap,se_f_gap") {
        throw std::runtime_error("aggregate CSV: unexpected header");
      }
      saw_header = true;
      continue;
    }
    std::array<double, 6> fields{};
    std::size_t field = 0;
    std::size_t start = 0;
    while (field < 6) {
      const std::size_t comma = line.find(',', start);
      const std::string_view tok =
          line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                             : comma - start);
      const char* b = tok.data();
      const char* e = b + tok.size();
      auto res = std::from_chars(b, e, fields[field]);
      if (res.ec != std::errc() || res.ptr != e) {
        throw std::runtime_error("aggregate CSV: malformed value on line " +
                                 std::to_string(line_no));
      }
      ++field;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (field != 6) {
      throw std::runtime_error("aggregate CSV: expected 6 columns on line " +
                               std::to_string(line_no));
    }
    AggregateRow r;
    r.n = static_cast<std::uint64_t>(fields[0]);
    r.alpha = fields[1];
    r.mean_err_sq = fields[2];
    r.se_err_sq = fields[3];
    r.mean_f_gap = fields[4];
    r.se_f_gap = fields[5];
    rows.push_back(r);
  }
  if (!saw_header) throw std::runtime_error("aggregate CSV: missing header");
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "gamma,optimizer,final_err,max_err,diverged\n";
  for (const SweepRow& r : rows) {
    append_g17(out, r.gamma);
    out += ',';
    out += method_name(r.optimizer);
    out += ',';
    append_g17(out, r.final_err);
    out += ',';
    append_g17(out, r.max_err);
    out += ',';
    out += r.diverged ? '1' : '0';
    out += '\n';
  }
  return out;
}

void emit_csv(std::span<const AggregateRow> rows, const std::string& path) {
  write_text_file(path, aggregate_csv(rows));
}

void emit_csv(std::span<const SweepRow> rows, const std::string& path) {
  write_text_file(path, sweep_csv(rows));
}

}  // namespace tsgd
