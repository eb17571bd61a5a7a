#pragma once

#include <cstdint>
#include <stdexcept>

namespace tsgd {

// Step-size schedule. The harmonic form alpha_n = theta / (n + gamma) is the
// one the convergence envelopes are stated for; a constant schedule is kept
// for comparison runs.
struct StepSchedule {
  enum class Kind { harmonic, constant };

  Kind kind = Kind::harmonic;
  double theta = 1.0;
  double gamma = 0.0;
  double value = 0.0;

  static StepSchedule harmonic(double theta, double gamma) {
    if (!(theta > 0.0)) throw std::invalid_argument("StepSchedule: theta must be positive");
    if (!(gamma >= 0.0)) throw std::invalid_argument("StepSchedule: gamma must be nonnegative");
    StepSchedule s;
    s.kind = Kind::harmonic;
    s.theta = theta;
    s.gamma = gamma;
    return s;
  }

  static StepSchedule constant(double value) {
    if (!(value > 0.0)) throw std::invalid_argument("StepSchedule: constant step must be positive");
    StepSchedule s;
    s.kind = Kind::constant;
    s.value = value;
    return s;
  }
};

// alpha_n for step index n (1-based).
inline double schedule_value(const StepSchedule& s, std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("schedule_value: step index is 1-based");
  if (s.kind == StepSchedule::Kind::constant) return s.value;
  return s.theta / (static_cast<double>(n) + s.gamma);
}

}  // namespace tsgd
