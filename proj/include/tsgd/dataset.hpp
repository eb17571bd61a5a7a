#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tsgd {

// Sparse binary-classification dataset. Rows hold (feature index, value)
// pairs sorted by index, indices 0-based internally; labels are stored
// mapped to {-1, +1}.
struct SparseDataset {
  std::size_t n_features = 0;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::vector<double> labels;

  std::size_t n_samples() const { return rows.size(); }
};

// Parses sparse text data, one sample per line:
//
//   label index:value index:value ...
//
// Labels must be one of {0, 1, -1, +1} and are mapped to {-1, +1} (0 -> -1).
// Feature indices are 1-based in the text and must be strictly ascending
// within a line. The feature count is the largest index seen unless
// n_features_override is given (it must not be smaller). Malformed input
// throws std::runtime_error with the offending line number.
SparseDataset parse_libsvm(std::string_view text,
                           std::optional<std::size_t> n_features_override = std::nullopt);

// Reads a file and parses it; a name ending in ".gz" is decompressed first.
SparseDataset load_libsvm_file(const std::string& path,
                               std::optional<std::size_t> n_features_override = std::nullopt);

// Canonical text form: labels "+1"/"-1", 1-based ascending indices, values
// printed with 17 significant digits, LF line endings. serialize(parse(.))
// is idempotent.
std::string serialize_libsvm(const SparseDataset& dataset);

}  // namespace tsgd
