#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tsgd {

// Dense parameter vector over the reals. All public operations reject
// non-finite entries instead of propagating them.
using ParamVector = std::vector<double>;

inline bool all_finite(const ParamVector& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline void require_finite(const ParamVector& v, const char* what) {
  if (!all_finite(v)) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

inline void require_same_size(const ParamVector& a, const ParamVector& b, const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

// Euclidean norm. Falls back to a scaled accumulation when the naive sum of
// squares overflows (entries near 1e200 still yield a finite norm).
inline double vec_norm(const ParamVector& v) {
  double sumsq = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument("vec_norm: non-finite entry");
    sumsq += x * x;
  }
  if (std::isfinite(sumsq)) return std::sqrt(sumsq);
  double amax = 0.0;
  for (double x : v) amax = std::max(amax, std::abs(x));
  double scaled = 0.0;
  for (double x : v) {
    const double t = x / amax;
    scaled += t * t;
  }
  return amax * std::sqrt(scaled);
}

inline double vec_dist(const ParamVector& a, const ParamVector& b) {
  require_same_size(a, b, "vec_dist");
  ParamVector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return vec_norm(d);
}

inline double dot(const ParamVector& a, const ParamVector& b) {
  require_same_size(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace tsgd
