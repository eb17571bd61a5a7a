#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "tsgd/rng.hpp"

namespace tsgd {

// Default mini-batch size: 1% of the sample count, at least 1.
inline std::size_t default_batch_size(std::size_t n_samples) {
  if (n_samples == 0) throw std::invalid_argument("default_batch_size: empty sample set");
  const std::size_t b = static_cast<std::size_t>(static_cast<double>(n_samples) * 0.01 + 0.5);
  return b < 1 ? 1 : b;
}

// Epoch-based mini-batch iterator: shuffles a permutation of the sample
// indices, serves consecutive slices of size batch_size (the last slice of
// an epoch may be shorter), and reshuffles exactly when the permutation is
// exhausted. Every sample appears exactly once per epoch.
class EpochBatcher {
 public:
  EpochBatcher(std::size_t n_samples, std::size_t batch_size, RngStream rng)
      : n_(n_samples), batch_size_(batch_size), rng_(rng), perm_(n_samples) {
    if (n_ == 0) throw std::invalid_argument("EpochBatcher: empty sample set");
    if (batch_size_ == 0 || batch_size_ > n_) {
      throw std::invalid_argument("EpochBatcher: batch size must be in [1, n_samples]");
    }
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    shuffle();
  }

  std::size_t n_samples() const { return n_; }
  std::size_t batch_size() const { return batch_size_; }

  std::vector<std::size_t> next_batch() {
    if (cursor_ == n_) {
      shuffle();
      cursor_ = 0;
    }
    const std::size_t take = std::min(batch_size_, n_ - cursor_);
    std::vector<std::size_t> batch(perm_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                                   perm_.begin() + static_cast<std::ptrdiff_t>(cursor_ + take));
    cursor_ += take;
    return batch;
  }

 private:
  void shuffle() {
    for (std::size_t i = n_ - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng_.next_below(i + 1));
      std::swap(perm_[i], perm_[j]);
    }
  }

  std::size_t n_;
  std::size_t batch_size_;
  RngStream rng_;
  std::vector<std::size_t> perm_;
  std::size_t cursor_ = 0;
};

}  // namespace tsgd
