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

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Sparse>

#include "approxml/common.hpp"

namespace approxml {

/// Row-major feature storage that is either dense or sparse. All products
/// needed by the model classes are exposed here so callers stay agnostic of
/// the representation.
class FeatureMatrix {
 public:
  using Dense = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  FeatureMatrix() = default;
  explicit FeatureMatrix(Dense dense);
  explicit FeatureMatrix(Sparse sparse);

  Index rows() const;
  Index cols() const;
  bool is_sparse() const { return std::holds_alternative<Sparse>(storage_); }

  /// X * M for a column vector or a matrix.
  Matrix times(const Matrix& m) const;
  Vector times(const Vector& v) const;
  /// X^T * W.
  Matrix transpose_times(const Matrix& w) const;
  Vector transpose_times(const Vector& w) const;
  /// X^T diag(w) X.
  Matrix weighted_gram(const Vector& w) const;

  Vector row(Index i) const;
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  Dense to_dense() const;

  const Dense* dense() const { return std::get_if<Dense>(&storage_); }
  const Sparse* sparse() const { return std::get_if<Sparse>(&storage_); }

 private:
  std::variant<Dense, Sparse> storage_;
};

/// Training corpus: N rows of dimension d and optional labels.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(FeatureMatrix features, std::optional<Vector> labels = std::nullopt);

  std::size_t n_rows() const { return static_cast<std::size_t>(features_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(features_.cols()); }
  bool has_labels() const { return labels_.has_value(); }

  const FeatureMatrix& features() const { return features_; }
  const Vector& labels() const;
  const std::optional<Vector>& maybe_labels() const { return labels_; }

  Dataset select_rows(std::span<const std::size_t> rows) const;

 private:
  FeatureMatrix features_;
  std::optional<Vector> labels_;
};

enum class DataFormat { csv, sparse_svm };

DataFormat parse_data_format(const std::string& name);

/// Reads a CSV (header line, comma separated) or sparse `label idx:val ...`
/// file with 1-based indices. For CSV, `label_col` names the label column
/// (a bare integer is accepted as a 0-based column index); without it every
/// column is a feature and the dataset is unlabeled. Sparse files always
/// carry labels in the first token.
Dataset load_dataset(const std::filesystem::path& path, DataFormat format,
                     const std::optional<std::string>& label_col = std::nullopt);

/// Distinct sorted label values; position is the class index.
struct ClassEncoding {
  std::vector<double> values;
  std::size_t classes() const { return values.size(); }
};

/// Replaces raw labels by class indices 0..K-1 (K >= 2 required).
std::pair<Dataset, ClassEncoding> encode_classes(const Dataset& data);

/// First n indices of a seeded partial Fisher-Yates shuffle of 0..N-1.
/// Prefixes are stable: the result for n is a prefix of the result for n' > n
/// under the same seed.
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n,
                                        std::uint64_t seed);

/// n distinct rows chosen uniformly without replacement.
Dataset uniform_sample(const Dataset& data, std::size_t n, std::uint64_t seed);

struct DataSplit {
  Dataset train;
  Dataset holdout;
  std::uint64_t seed = 0;
};

/// Disjoint train/holdout partition with |holdout| = round(frac * N).
DataSplit split(const Dataset& data, double holdout_frac, std::uint64_t seed);

}  // namespace approxml
