// Copyright 2026 The approxml Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "approxml/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace approxml {

// ---------------------------------------------------------------------------
// FeatureMatrix

FeatureMatrix::FeatureMatrix(Dense dense) : storage_(std::move(dense)) {}
FeatureMatrix::FeatureMatrix(Sparse sparse) : storage_(std::move(sparse)) {
  std::get<Sparse>(storage_).makeCompressed();
}

Index FeatureMatrix::rows() const {
  return std::visit([](const auto& x) { return static_cast<Index>(x.rows()); }, storage_);
}

Index FeatureMatrix::cols() const {
  return std::visit([](const auto& x) { return static_cast<Index>(x.cols()); }, storage_);
}

Matrix FeatureMatrix::times(const Matrix& m) const {
  return std::visit([&](const auto& x) -> Matrix { return x * m; }, storage_);
}

Vector FeatureMatrix::times(const Vector& v) const {
  return std::visit([&](const auto& x) -> Vector { return x * v; }, storage_);
}

Matrix FeatureMatrix::transpose_times(const Matrix& w) const {
  return std::visit([&](const auto& x) -> Matrix { return x.transpose() * w; }, storage_);
}

Vector FeatureMatrix::transpose_times(const Vector& w) const {
  return std::visit([&](const auto& x) -> Vector { return x.transpose() * w; }, storage_);
}

Matrix FeatureMatrix::weighted_gram(const Vector& w) const {
  if (const auto* d = dense()) {
    Dense scaled = w.asDiagonal() * (*d);
    return d->transpose() * scaled;
  }
  const auto& s = *sparse();
  Sparse scaled = w.asDiagonal() * s;
  return Matrix(s.transpose() * scaled);
}

Vector FeatureMatrix::row(Index i) const {
  if (const auto* d = dense()) return d->row(i).transpose();
  return Vector(sparse()->row(i).transpose());
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  if (const auto* d = dense()) {
    Dense out(static_cast<Index>(rows.size()), d->cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = d->row(static_cast<Index>(rows[i]));
    return FeatureMatrix(std::move(out));
  }
  const auto& s = *sparse();
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Sparse::InnerIterator it(s, static_cast<Index>(rows[i])); it; ++it) {
      triplets.emplace_back(static_cast<Index>(i), it.col(), it.value());
    }
  }
  Sparse out(static_cast<Index>(rows.size()), s.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return FeatureMatrix(std::move(out));
}

FeatureMatrix::Dense FeatureMatrix::to_dense() const {
  if (const auto* d = dense()) return *d;
  return Dense(*sparse());
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(FeatureMatrix features, std::optional<Vector> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.cols() < 1) throw InvalidArgument("dataset must have at least one feature");
  if (labels_ && labels_->size() != features_.rows()) {
    throw InvalidArgument("label count " + std::to_string(labels_->size()) +
                          " does not match row count " + std::to_string(features_.rows()));
  }
}

const Vector& Dataset::labels() const {
  if (!labels_) throw InvalidArgument("dataset has no labels");
  return *labels_;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  std::optional<Vector> labels;
  if (labels_) {
    labels = Vector(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) (*labels)(static_cast<Index>(i)) = (*labels_)(static_cast<Index>(rows[i]));
  }
  return Dataset(features_.select_rows(rows), std::move(labels));
}

// ---------------------------------------------------------------------------
// Loading

DataFormat parse_data_format(const std::string& name) {
  if (name == "csv") return DataFormat::csv;
  if (name == "sparse-svm" || name == "svm" || name == "libsvm") return DataFormat::sparse_svm;
  throw InvalidArgument("unknown data format '" + name + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

[[noreturn]] void parse_error(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw InvalidArgument(path.string() + ":" + std::to_string(line) + ": " + what);
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<std::string>& label_col) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, header_line)) {
    ++line_no;
    if (!trim(header_line).empty()) break;
  }
  if (trim(header_line).empty()) throw InvalidArgument(path.string() + ": empty file");
  header = split_fields(header_line, ',');
  const std::size_t width = header.size();

  std::optional<std::size_t> label_index;
  if (label_col) {
    auto it = std::find(header.begin(), header.end(), std::string_view(*label_col));
    if (it != header.end()) {
      label_index = static_cast<std::size_t>(it - header.begin());
    } else if (auto idx = parse_number(*label_col); idx && *idx >= 0 && std::floor(*idx) == *idx &&
                                                    static_cast<std::size_t>(*idx) < width) {
      label_index = static_cast<std::size_t>(*idx);
    } else {
      throw InvalidArgument(path.string() + ": label column '" + *label_col + "' not found in header");
    }
  }
  const std::size_t dim = width - (label_index ? 1 : 0);
  if (dim == 0) throw InvalidArgument(path.string() + ": no feature columns");

  std::vector<double> values;
  std::vector<double> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line, ',');
    if (fields.size() != width) {
      parse_error(path, line_no, "dimension mismatch: expected " + std::to_string(width) + " fields, found " +
                                     std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < width; ++j) {
      auto v = parse_number(fields[j]);
      if (!v) parse_error(path, line_no, "non-numeric cell '" + std::string(fields[j]) + "' in column " + std::to_string(j + 1));
      if (label_index && j == *label_index) {
        labels.push_back(*v);
      } else {
        values.push_back(*v);
      }
    }
  }
  const auto rows = static_cast<Index>(values.size() / dim);
  if (rows == 0) throw InvalidArgument(path.string() + ": no data rows");
  FeatureMatrix::Dense x = Eigen::Map<FeatureMatrix::Dense>(values.data(), rows, static_cast<Index>(dim));
  std::optional<Vector> y;
  if (label_index) y = Eigen::Map<Vector>(labels.data(), rows);
  return Dataset(FeatureMatrix(std::move(x)), std::move(y));
}

Dataset load_sparse(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> labels;
  Index max_col = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = trim(line);
    if (rest.empty() || rest.front() == '#') continue;
    std::istringstream tokens{std::string(rest)};
    std::string tok;
    tokens >> tok;
    auto label = parse_number(tok);
    if (!label) parse_error(path, line_no, "non-numeric label '" + tok + "'");
    const auto row = static_cast<Index>(labels.size());
    labels.push_back(*label);
    while (tokens >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos) parse_error(path, line_no, "expected idx:val, found '" + tok + "'");
      auto idx = parse_number(std::string_view(tok).substr(0, colon));
      auto val = parse_number(std::string_view(tok).substr(colon + 1));
      if (!idx || !val || *idx < 1 || std::floor(*idx) != *idx) {
        parse_error(path, line_no, "malformed entry '" + tok + "' (indices are 1-based integers)");
      }
      const auto col = static_cast<Index>(*idx) - 1;
      max_col = std::max(max_col, col + 1);
      triplets.emplace_back(row, col, *val);
    }
  }
  if (labels.empty()) throw InvalidArgument(path.string() + ": no data rows");
  if (max_col == 0) throw InvalidArgument(path.string() + ": no feature entries");
  FeatureMatrix::Sparse x(static_cast<Index>(labels.size()), max_col);
  x.setFromTriplets(triplets.begin(), triplets.end());
  return Dataset(FeatureMatrix(std::move(x)), Vector(Eigen::Map<Vector>(labels.data(), static_cast<Index>(labels.size()))));
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path, DataFormat format,
                     const std::optional<std::string>& label_col) {
  if (!std::filesystem::exists(path)) throw InvalidArgument("no such file '" + path.string() + "'");
  return format == DataFormat::csv ? load_csv(path, label_col) : load_sparse(path);
}

std::pair<Dataset, ClassEncoding> encode_classes(const Dataset& data) {
  const Vector& y = data.labels();
  ClassEncoding enc;
  enc.values.assign(y.data(), y.data() + y.size());
  std::sort(enc.values.begin(), enc.values.end());
  enc.values.erase(std::unique(enc.values.begin(), enc.values.end()), enc.values.end());
  if (enc.classes() < 2) throw InvalidArgument("classification needs at least two distinct labels");
  Vector idx(y.size());
  for (Index i = 0; i < y.size(); ++i) {
    auto it = std::lower_bound(enc.values.begin(), enc.values.end(), y(i));
    idx(i) = static_cast<double>(it - enc.values.begin());
  }
  return {Dataset(data.features(), std::move(idx)), std::move(enc)};
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n, std::uint64_t seed) {
  if (n < 1 || n > population) {
    throw InvalidArgument("sample size " + std::to_string(n) + " outside [1, " + std::to_string(population) + "]");
  }
  std::vector<std::size_t> perm(population);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, population - 1);
    std::swap(perm[i], perm[pick(rng)]);
  }
  perm.resize(n);
  return perm;
}

Dataset uniform_sample(const Dataset& data, std::size_t n, std::uint64_t seed) {
  auto rows = sample_indices(data.n_rows(), n, seed);
  return data.select_rows(rows);
}

DataSplit split(const Dataset& data, double holdout_frac, std::uint64_t seed) {
  if (!(holdout_frac > 0.0 && holdout_frac < 1.0)) throw InvalidArgument("holdout fraction must lie in (0, 1)");
  const std::size_t n = data.n_rows();
  const auto n_holdout = static_cast<std::size_t>(std::llround(holdout_frac * static_cast<double>(n)));
  if (n_holdout == 0 || n_holdout >= n) {
    throw InvalidArgument("degenerate split: " + std::to_string(n - n_holdout) + " train / " +
                          std::to_string(n_holdout) + " holdout rows");
  }
  auto perm = sample_indices(n, n, seed);
  std::span<const std::size_t> all(perm);
  DataSplit out;
  out.holdout = data.select_rows(all.first(n_holdout));
  out.train = data.select_rows(all.subspan(n_holdout));
  out.seed = seed;
  return out;
}

}  // namespace approxml
