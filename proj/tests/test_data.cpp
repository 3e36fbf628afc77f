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

#include <doctest.h>

#include <algorithm>
#include <set>

#include "test_util.hpp"

using namespace approxml;
using approxml::testing::TempFile;

TEST_CASE("csv with a named label column") {
  TempFile f("x1,x2,y\n1,2,0\n3,4,1\n");
  Dataset d = load_dataset(f.path(), DataFormat::csv, "y");
  CHECK(d.n_rows() == 2);
  CHECK(d.dim() == 2);
  REQUIRE(d.has_labels());
  CHECK(d.labels()(0) == 0.0);
  CHECK(d.labels()(1) == 1.0);
  const auto x = d.features().to_dense();
  CHECK(x(1, 0) == 3.0);
  CHECK(x(1, 1) == 4.0);
}

TEST_CASE("csv without a label column is unlabeled") {
  TempFile f("x1,x2,y\n1,2,0\n3,4,1\n");
  Dataset d = load_dataset(f.path(), DataFormat::csv);
  CHECK(d.n_rows() == 2);
  CHECK(d.dim() == 3);
  CHECK_FALSE(d.has_labels());
}

TEST_CASE("csv label column by index") {
  TempFile f("a,b,c\n1,7,2\n3,8,4\n");
  Dataset d = load_dataset(f.path(), DataFormat::csv, "1");
  CHECK(d.dim() == 2);
  CHECK(d.labels()(1) == 8.0);
  CHECK(d.features().to_dense()(1, 1) == 4.0);
}

TEST_CASE("csv dimension mismatch reports the line") {
  TempFile f("a,b,c,d\n1,2,3,4\n1,2,3\n");
  try {
    load_dataset(f.path(), DataFormat::csv);
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
}

TEST_CASE("csv non-numeric cell reports the line") {
  TempFile f("a,y\n1,0\nabc,1\n");
  try {
    load_dataset(f.path(), DataFormat::csv, "y");
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
}

TEST_CASE("csv missing label column and missing file") {
  TempFile f("a,b\n1,2\n");
  CHECK_THROWS_AS(load_dataset(f.path(), DataFormat::csv, "y"), InvalidArgument);
  CHECK_THROWS_AS(load_dataset("/nonexistent/file.csv", DataFormat::csv), InvalidArgument);
}

TEST_CASE("sparse format with 1-based indices") {
  TempFile f("1 1:0.5 3:2\n0 2:1.5\n", ".svm");
  Dataset d = load_dataset(f.path(), DataFormat::sparse_svm);
  CHECK(d.n_rows() == 2);
  CHECK(d.dim() == 3);
  CHECK(d.features().is_sparse());
  const auto x = d.features().to_dense();
  CHECK(x(0, 0) == 0.5);
  CHECK(x(0, 1) == 0.0);
  CHECK(x(0, 2) == 2.0);
  CHECK(x(1, 1) == 1.5);
  CHECK(d.labels()(0) == 1.0);
}

TEST_CASE("sparse format rejects index 0") {
  TempFile f("1 0:0.5\n", ".svm");
  CHECK_THROWS_AS(load_dataset(f.path(), DataFormat::sparse_svm), InvalidArgument);
}

TEST_CASE("data format names") {
  CHECK(parse_data_format("csv") == DataFormat::csv);
  CHECK(parse_data_format("sparse-svm") == DataFormat::sparse_svm);
  CHECK(parse_data_format("libsvm") == DataFormat::sparse_svm);
  CHECK_THROWS_AS(parse_data_format("parquet"), InvalidArgument);
}

TEST_CASE("dataset invariants") {
  FeatureMatrix::Dense x(3, 2);
  x.setOnes();
  CHECK_THROWS_AS(Dataset(FeatureMatrix(x), Vector::Zero(2)), InvalidArgument);
  CHECK_THROWS_AS(Dataset(FeatureMatrix(FeatureMatrix::Dense(3, 0))), InvalidArgument);
}

TEST_CASE("class encoding maps sorted distinct values to indices") {
  Dataset d = approxml::testing::dense({{1}, {2}, {3}, {4}}, approxml::testing::vec({-1, 5, -1, 2}));
  auto [enc, classes] = encode_classes(d);
  CHECK(classes.values == std::vector<double>{-1, 2, 5});
  CHECK(enc.labels()(0) == 0.0);
  CHECK(enc.labels()(1) == 2.0);
  CHECK(enc.labels()(3) == 1.0);
  CHECK_THROWS_AS(encode_classes(approxml::testing::dense({{1}, {2}}, approxml::testing::vec({3, 3}))),
                  InvalidArgument);
}

TEST_CASE("uniform_sample full size is a permutation") {
  Dataset d = approxml::testing::dense({{0}, {1}, {2}, {3}, {4}}, approxml::testing::vec({0, 1, 2, 3, 4}));
  Dataset s = uniform_sample(d, 5, 9);
  std::vector<double> rows(s.labels().data(), s.labels().data() + 5);
  std::sort(rows.begin(), rows.end());
  CHECK(rows == std::vector<double>{0, 1, 2, 3, 4});
  for (Index i = 0; i < 5; ++i) CHECK(s.features().to_dense()(i, 0) == s.labels()(i));
}

TEST_CASE("uniform_sample size errors") {
  Dataset d = approxml::testing::dense({{0}, {1}});
  CHECK_THROWS_AS(uniform_sample(d, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(uniform_sample(d, 3, 1), InvalidArgument);
}

TEST_CASE("single-row samples are uniform over four rows") {
  const int reps = 100000;
  std::vector<int> counts(4, 0);
  for (int r = 0; r < reps; ++r) counts[sample_indices(4, 1, derive_seed(17, r))[0]]++;
  for (int c : counts) CHECK(std::abs(static_cast<double>(c) / reps - 0.25) < 0.01);
}

TEST_CASE("inclusion counts pass a chi-square goodness-of-fit test") {
  // N=10, n=3, 10^4 repetitions: each row is included with probability 0.3.
  const std::size_t population = 10;
  const std::size_t n = 3;
  const int reps = 10000;
  std::vector<double> counts(population, 0.0);
  for (int r = 0; r < reps; ++r) {
    for (auto i : sample_indices(population, n, derive_seed(5, r))) counts[i] += 1.0;
  }
  const double expected = reps * static_cast<double>(n) / static_cast<double>(population);
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // The statistic sums to a fixed total, so df = N - 1 = 9; the 0.99 quantile is 21.666.
  CHECK(chi2 < 21.666);
}

TEST_CASE("sampling is deterministic and prefix stable") {
  auto a = sample_indices(1000, 50, 42);
  auto b = sample_indices(1000, 50, 42);
  auto c = sample_indices(1000, 200, 42);
  CHECK(a == b);
  CHECK(std::equal(a.begin(), a.end(), c.begin()));
  CHECK(std::set<std::size_t>(c.begin(), c.end()).size() == 200);
  CHECK(sample_indices(1000, 50, 43) != a);
}

TEST_CASE("split sizes and determinism") {
  FeatureMatrix::Dense x(10, 1);
  for (Index i = 0; i < 10; ++i) x(i, 0) = static_cast<double>(i);
  Dataset d{FeatureMatrix(x)};
  DataSplit s = split(d, 0.2, 3);
  CHECK(s.train.n_rows() == 8);
  CHECK(s.holdout.n_rows() == 2);
  std::set<double> seen;
  for (const auto* part : {&s.train, &s.holdout}) {
    const auto m = part->features().to_dense();
    for (Index i = 0; i < m.rows(); ++i) seen.insert(m(i, 0));
  }
  CHECK(seen.size() == 10);
  DataSplit again = split(d, 0.2, 3);
  CHECK(again.holdout.features().to_dense() == s.holdout.features().to_dense());
  CHECK(again.train.features().to_dense() == s.train.features().to_dense());
}

TEST_CASE("degenerate split is rejected") {
  FeatureMatrix::Dense x(5, 1);
  x.setZero();
  Dataset d{FeatureMatrix(x)};
  CHECK_THROWS_AS(split(d, 0.99, 1), InvalidArgument);
  CHECK_THROWS_AS(split(d, 0.01, 1), InvalidArgument);
  CHECK_THROWS_AS(split(d, 1.0, 1), InvalidArgument);
}

TEST_CASE("sparse and dense features agree on products") {
  Rng rng(4);
  std::normal_distribution<double> normal;
  FeatureMatrix::Dense x(20, 6);
  for (Index i = 0; i < 20; ++i)
    for (Index j = 0; j < 6; ++j) x(i, j) = (i + j) % 3 == 0 ? normal(rng) : 0.0;
  FeatureMatrix dm(x);
  FeatureMatrix sm(FeatureMatrix::Sparse(x.sparseView()));
  Matrix w = Matrix::Random(6, 3);
  Matrix v = Matrix::Random(20, 2);
  Vector weights = Vector::Random(20);
  CHECK((dm.times(w) - sm.times(w)).norm() < 1e-12);
  CHECK((dm.transpose_times(v) - sm.transpose_times(v)).norm() < 1e-12);
  CHECK((dm.weighted_gram(weights) - sm.weighted_gram(weights)).norm() < 1e-12);
  std::vector<std::size_t> rows{3, 0, 7};
  CHECK(dm.select_rows(rows).to_dense() == sm.select_rows(rows).to_dense());
}
