#include "tsgd/dataset.hpp"

#include <zlib.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tsgd {

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

// from_chars does not accept a leading '+', which LIBSVM labels ("+1") and
// occasionally values use.
std::string_view strip_plus(std::string_view tok) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  return tok;
}

bool parse_double(std::string_view tok, double& out) {
  tok = strip_plus(tok);
  if (tok.empty()) return false;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool parse_index(std::string_view tok, std::size_t& out) {
  if (tok.empty()) return false;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

}  // namespace

SparseDataset parse_libsvm(std::string_view text, std::optional<std::size_t> n_features_override) {
  SparseDataset ds;
  std::size_t max_index = 0;  // 1-based
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                          : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto toks = split_ws(line);
    if (toks.empty()) continue;  // blank line

    double raw_label = 0.0;
    if (!parse_double(toks[0], raw_label)) {
      parse_fail(line_no, "malformed label '" + std::string(toks[0]) + "'");
    }
    double label = 0.0;
    if (raw_label == 0.0) {
      label = -1.0;
    } else if (raw_label == 1.0) {
      label = 1.0;
    } else if (raw_label == -1.0) {
      label = -1.0;
    } else {
      parse_fail(line_no, "label must be one of {0, 1, -1, +1}, got '" + std::string(toks[0]) + "'");
    }

    std::vector<std::pair<std::size_t, double>> row;
    row.reserve(toks.size() - 1);
    std::size_t prev_index = 0;  // 1-based; features must be strictly ascending
    for (std::size_t t = 1; t < toks.size(); ++t) {
      const std::string_view tok = toks[t];
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos || colon == 0 || colon + 1 == tok.size()) {
        parse_fail(line_no, "malformed feature token '" + std::string(tok) + "'");
      }
      std::size_t index = 0;
      double value = 0.0;
      if (!parse_index(tok.substr(0, colon), index) || index == 0) {
        parse_fail(line_no, "malformed feature index in '" + std::string(tok) + "'");
      }
      if (!parse_double(tok.substr(colon + 1), value) || !std::isfinite(value)) {
        parse_fail(line_no, "malformed feature value in '" + std::string(tok) + "'");
      }
      if (index <= prev_index) {
        parse_fail(line_no, "feature indices must be strictly ascending, got " +
                                std::to_string(index) + " after " + std::to_string(prev_index));
      }
      prev_index = index;
      row.emplace_back(index - 1, value);
    }
    max_index = std::max(max_index, prev_index);
    ds.rows.push_back(std::move(row));
    ds.labels.push_back(label);
  }

  if (ds.rows.empty()) throw std::runtime_error("empty dataset: no samples found");

  ds.n_features = max_index;
  if (n_features_override) {
    if (*n_features_override < max_index) {
      throw std::runtime_error("n_features override " + std::to_string(*n_features_override) +
                               " is below the largest feature index " + std::to_string(max_index));
    }
    ds.n_features = *n_features_override;
  }
  return ds;
}

namespace {

std::string read_gz(const std::string& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw std::runtime_error("cannot open '" + path + "'");
  std::string out;
  char buf[1 << 16];
  int got = 0;
  while ((got = gzread(f, buf, sizeof(buf))) > 0) {
    out.append(buf, static_cast<std::size_t>(got));
  }
  const bool bad = got < 0;
  gzclose(f);
  if (bad) throw std::runtime_error("error decompressing '" + path + "'");
  return out;
}

std::string read_plain(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

SparseDataset load_libsvm_file(const std::string& path,
                               std::optional<std::size_t> n_features_override) {
  const bool gz = path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
  const std::string text = gz ? read_gz(path) : read_plain(path);
  return parse_libsvm(text, n_features_override);
}

std::string serialize_libsvm(const SparseDataset& dataset) {
  std::string out;
  char buf[64];
  for (std::size_t r = 0; r < dataset.rows.size(); ++r) {
    out += dataset.labels[r] > 0 ? "+1" : "-1";
    for (const auto& [index, value] : dataset.rows[r]) {
      std::snprintf(buf, sizeof(buf), " %zu:%.17g", index + 1, value);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace tsgd
