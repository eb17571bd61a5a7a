#pragma once

#include <cstdint>
#include <vector>

namespace tsgd {

// One recorded point of a sample path. Row n describes the iterate w^n:
// err_sq and f_value are evaluated at w^n, alpha is the step size the
// schedule assigns to step n, step_len and grad_norm describe the step that
// produced w^n (zero in the first row), and cum_tamed accumulates
// sum_{i<n} min{1, alpha_i ||g_i||} over all steps taken so far, recorded or
// not.
struct TraceRow {
  std::uint64_t n = 0;
  double alpha = 0.0;
  double err_sq = 0.0;
  double f_value = 0.0;
  double step_len = 0.0;
  double grad_norm = 0.0;
  double cum_tamed = 0.0;
};

// A single sample path. Rows are recorded on the configured grid plus the
// final iterate; a run that trips the divergence guard is truncated at the
// offending step and flagged.
struct RunTrace {
  std::vector<TraceRow> rows;
  bool diverged = false;
  std::uint64_t divergence_step = 0;
};

}  // namespace tsgd
