#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace tsgd {

// Counter-based splittable random stream. A stream is addressed by
// (seed, stream_id); the n-th output is a pure function of that address and n,
// so replaying a stream is exact and distinct stream ids give statistically
// independent sequences regardless of thread scheduling. The core mixer is
// splitmix64; distributions (uniform, gaussian) are generated here rather
// than through <random> because the standard distributions are
// implementation-defined and would break the bit-for-bit replay contract.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0)
      : seed_(seed), stream_(stream_id), state_(derive_key(seed, stream_id)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [-1, 1].
  double next_symmetric() { return 2.0 * next_unit() - 1.0; }

  // Standard normal via Box-Muller; the paired draw is cached.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Unbiased integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream_id) {
    return mix(seed + kGamma * mix(stream_id + kGamma));
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stream ids at and above this value are reserved for internal consumers
// (reference runs, seeded initial iterates); per-path streams use 0..n_paths-1.
inline constexpr std::uint64_t kReservedStreamBase = 0x4000000000000000ull;
inline constexpr std::uint64_t kInitStream = kReservedStreamBase + 1;
inline constexpr std::uint64_t kReferenceStream = kReservedStreamBase + 2;
inline constexpr std::uint64_t kEstimateStream = kReservedStreamBase + 3;

}  // namespace tsgd
