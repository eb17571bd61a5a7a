// Python bindings for the tamed stochastic gradient toolkit: step math,
// bound envelopes, sparse-text data handling, and the experiment driver.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tsgd/dataset.hpp"
#include "tsgd/experiment.hpp"
#include "tsgd/rng.hpp"
#include "tsgd/steps.hpp"
#include "tsgd/theory.hpp"

namespace py = pybind11;

namespace {

tsgd::ParamVector step_with(const tsgd::ParamVector& w, const tsgd::ParamVector& g, double alpha,
                            bool tamed) {
  tsgd::OptimizerState state{w, 1, tsgd::StepSchedule::constant(alpha)};
  const tsgd::OptimizerState next = tamed ? tsgd::tsgd_step(state, g) : tsgd::sgd_step(state, g);
  return next.iterate;
}

py::dict dataset_to_dict(const tsgd::SparseDataset& data) {
  py::dict out;
  out["n_features"] = data.n_features;
  out["labels"] = data.labels;
  py::list rows;
  for (const auto& row : data.rows) {
    py::list entries;
    for (const auto& [index, value] : row) {
      entries.append(py::make_tuple(index, value));
    }
    rows.append(std::move(entries));
  }
  out["rows"] = std::move(rows);
  return out;
}

py::dict run_experiment(const std::string& config_json) {
  const tsgd::ExperimentConfig cfg = tsgd::ExperimentConfig::from_json_text(config_json);
  const tsgd::RunResult res = tsgd::run_paths(cfg);

  py::dict aggregate;
  std::vector<std::uint64_t> ns;
  std::vector<double> alpha, mean_err_sq, se_err_sq, mean_f_gap, se_f_gap;
  for (const tsgd::AggregateRow& row : res.aggregate) {
    ns.push_back(row.n);
    alpha.push_back(row.alpha);
    mean_err_sq.push_back(row.mean_err_sq);
    se_err_sq.push_back(row.se_err_sq);
    mean_f_gap.push_back(row.mean_f_gap);
    se_f_gap.push_back(row.se_f_gap);
  }
  aggregate["n"] = std::move(ns);
  aggregate["alpha"] = std::move(alpha);
  aggregate["mean_err_sq"] = std::move(mean_err_sq);
  aggregate["se_err_sq"] = std::move(se_err_sq);
  aggregate["mean_f_gap"] = std::move(mean_f_gap);
  aggregate["se_f_gap"] = std::move(se_f_gap);

  py::dict out;
  out["aggregate"] = std::move(aggregate);
  out["csv"] = tsgd::aggregate_csv(res.aggregate);
  out["w1"] = res.w1;
  if (res.w_star.empty()) {
    out["w_star"] = py::none();
  } else {
    out["w_star"] = res.w_star;
  }
  out["f_star"] = res.f_star;
  out["diverged_paths"] = res.diverged_paths;
  out["worst_pathwise_slack"] = res.worst_pathwise_slack;
  return out;
}

py::list run_gamma_sweep(const std::string& config_json, const std::vector<double>& gammas) {
  const tsgd::ExperimentConfig cfg = tsgd::ExperimentConfig::from_json_text(config_json);
  py::list out;
  for (const tsgd::SweepRow& row : tsgd::gamma_sweep(cfg, gammas)) {
    py::dict entry;
    entry["gamma"] = row.gamma;
    entry["optimizer"] = tsgd::method_name(row.optimizer);
    entry["final_err"] = row.final_err;
    entry["max_err"] = row.max_err;
    entry["diverged"] = row.diverged;
    out.append(std::move(entry));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_tsgd, m) {
  m.doc() = "Tamed stochastic gradient descent: steps, bound envelopes, and experiments";

  // --- step math ---
  m.def("taming_factor", &tsgd::taming_factor, py::arg("alpha"), py::arg("grad_norm"),
        "Realized fraction of the raw step: t/(1+t) with t = alpha*||g||.");
  m.def("harmonic_step", [](double theta, double gamma, std::uint64_t n) {
          return tsgd::schedule_value(tsgd::StepSchedule::harmonic(theta, gamma), n);
        },
        py::arg("theta"), py::arg("gamma"), py::arg("n"),
        "Step size theta/(n+gamma) for 1-based step index n.");
  m.def("tsgd_step", [](const tsgd::ParamVector& w, const tsgd::ParamVector& g, double alpha) {
          return step_with(w, g, alpha, true);
        },
        py::arg("w"), py::arg("g"), py::arg("alpha"),
        "One tamed step: w - alpha*g/(1 + alpha*||g||).");
  m.def("sgd_step", [](const tsgd::ParamVector& w, const tsgd::ParamVector& g, double alpha) {
          return step_with(w, g, alpha, false);
        },
        py::arg("w"), py::arg("g"), py::arg("alpha"), "One plain gradient step: w - alpha*g.");
  m.def("perturbation_decomposition", &tsgd::perturbation_decomposition, py::arg("alpha"),
        py::arg("g"),
        "Splits the tamed increment into (alpha*g, second-order remainder).");

  // --- bound envelopes and inequalities ---
  m.def("decay_envelope", &tsgd::decay_envelope, py::arg("n"), py::arg("x"), py::arg("y"),
        py::arg("k"), py::arg("init_err_sq"));
  m.def("harmonic_envelope", &tsgd::harmonic_envelope, py::arg("n"), py::arg("theta"),
        py::arg("gamma"), py::arg("mu"), py::arg("k"), py::arg("init_err_sq"));
  m.def("bounded_gradient_envelope", &tsgd::bounded_gradient_envelope, py::arg("n"),
        py::arg("theta"), py::arg("gamma"), py::arg("mu"), py::arg("b_bound"), py::arg("k"),
        py::arg("init_err_sq"));
  m.def("contraction_constant", &tsgd::contraction_constant, py::arg("theta"), py::arg("gamma"),
        py::arg("mu"), py::arg("lipschitz"), py::arg("sigma_at_star"), py::arg("init_dist"));
  m.def("envelope_k", &tsgd::envelope_k, py::arg("theta"), py::arg("lipschitz"), py::arg("mu2"),
        py::arg("sigma"), py::arg("m2"), py::arg("m4"));
  m.def("contraction_envelope_k", &tsgd::contraction_envelope_k, py::arg("theta"),
        py::arg("lipschitz"), py::arg("sigma"), py::arg("m2"));
  m.def("bounded_envelope_k", &tsgd::bounded_envelope_k, py::arg("b_bound"),
        py::arg("noise_ratio"), py::arg("sigma"), py::arg("m2"));
  m.def("objective_gap_sandwich", &tsgd::objective_gap_sandwich, py::arg("f_at_w"),
        py::arg("f_at_star"), py::arg("dist_sq"), py::arg("mu"), py::arg("lipschitz"),
        "Slacks (upper, lower) of (mu/2)d^2 <= F(w)-F* <= (lip/2)d^2.");
  m.def("harmonic_product_bound", &tsgd::harmonic_product_bound, py::arg("x"), py::arg("y"),
        py::arg("m"), py::arg("n"), "Returns (exact product, closed-form bound).");
  m.def("harmonic_sum_bound", &tsgd::harmonic_sum_bound, py::arg("x"), py::arg("y"), py::arg("n"),
        "Returns (exact weighted sum, closed-form bound).");
  m.def("tangent_line_bound", &tsgd::tangent_line_bound, py::arg("a"), py::arg("b"), py::arg("x"),
        "Returns (-1/(a x + b), its tangent line at 0).");

  // --- sparse text data ---
  m.def("parse_libsvm", [](const std::string& text) { return dataset_to_dict(tsgd::parse_libsvm(text)); },
        py::arg("text"), "Parses 'label index:value ...' lines into a dict.");
  m.def("load_libsvm_file", [](const std::string& path) {
          return dataset_to_dict(tsgd::load_libsvm_file(path));
        },
        py::arg("path"), "Loads a sparse text file (gzip-compressed when named *.gz).");
  m.def("canonicalize_libsvm", [](const std::string& text) {
          return tsgd::serialize_libsvm(tsgd::parse_libsvm(text));
        },
        py::arg("text"), "Canonical text form; idempotent.");

  // --- experiments ---
  m.def("run_experiment", &run_experiment, py::arg("config_json"),
        "Runs a JSON-configured experiment; returns aggregate columns and summary fields.");
  m.def("gamma_sweep", &run_gamma_sweep, py::arg("config_json"), py::arg("gammas"),
        "Re-runs the config across offsets for both optimizers.");
  m.def("fit_rate_points", [](const std::vector<double>& ns, const std::vector<double>& means) {
          return tsgd::fit_rate_points(ns, means);
        },
        py::arg("ns"), py::arg("means"), "Log-log least-squares slope.");

  // --- reproducible random streams ---
  py::class_<tsgd::RngStream>(m, "RngStream", "Counter-based random stream keyed by (seed, stream).")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream"))
      .def("next_unit", &tsgd::RngStream::next_unit, "Uniform draw in [0, 1).")
      .def("next_gaussian", &tsgd::RngStream::next_gaussian, "Standard normal draw.")
      .def("next_below", &tsgd::RngStream::next_below, py::arg("bound"),
           "Uniform integer in [0, bound).");
}
