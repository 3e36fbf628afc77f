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

#include "approxml/psampler.hpp"
#include "test_util.hpp"

using namespace approxml;
using approxml::testing::vec;

namespace {

StatFactors random_factors(Index dp, Index rank, double beta, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  Matrix q(200, dp);
  for (Index i = 0; i < q.rows(); ++i) {
    for (Index j = 0; j < dp; ++j) q(i, j) = j < rank ? normal(rng) * (1.0 + j) : 0.0;
  }
  return factorize_scores(q / std::sqrt(200.0), beta, 200);
}

Matrix empirical_covariance(const Matrix& draws) {
  Matrix c = draws.colwise() - draws.rowwise().mean();
  return c * c.transpose() / static_cast<double>(draws.cols() - 1);
}

}  // namespace

TEST_CASE("lambda for a single singular value") {
  StatFactors f{Matrix::Identity(1, 1), vec({2.0}), 1.0, 10};
  CHECK(f.lambda()(0) == doctest::Approx(0.4).epsilon(1e-15));
  ParamSampler s = ParamSampler::from_factors(f, 1);
  CHECK(s.mode() == ParamSampler::Mode::factor);
  CHECK(s.transform()(0, 0) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("factor sampler covariance matches the dense formula") {
  StatFactors f = random_factors(5, 5, 0.1, 3);
  ParamSampler s = ParamSampler::from_factors(f, 9);
  CHECK((s.covariance() - covariance_explicit(f, 1.0)).norm() < 1e-10 * s.covariance().norm());

  Matrix draws = s.draw_base(100000);
  Matrix emp = empirical_covariance(draws);
  CHECK((emp - s.covariance()).norm() / s.covariance().norm() < 0.03);
}

TEST_CASE("factor sampler handles rank-deficient scores") {
  StatFactors f = random_factors(6, 3, 0.5, 4);
  REQUIRE(f.rank() == 3);
  ParamSampler s = ParamSampler::from_factors(f, 2);
  CHECK(s.dim() == 6);
  Matrix draws = s.draw_base(10);
  CHECK(draws.rows() == 6);
  CHECK(draws.bottomRows(3).norm() < 1e-12);
}

TEST_CASE("explicit sampler reproduces H^-1 J H^-1") {
  Rng rng(8);
  std::normal_distribution<double> normal;
  Matrix a(4, 4);
  Matrix b(4, 4);
  for (Index i = 0; i < 16; ++i) {
    a.data()[i] = normal(rng);
    b.data()[i] = normal(rng);
  }
  HessianPair p{a * a.transpose() + Matrix::Identity(4, 4), b * b.transpose() + 0.1 * Matrix::Identity(4, 4)};
  ParamSampler s = ParamSampler::from_pair(p, 5);
  CHECK(s.mode() == ParamSampler::Mode::explicit_cholesky);
  Matrix target = covariance_explicit(p, 1.0);
  CHECK((s.covariance() - target).norm() < 1e-6 * target.norm());
  Matrix emp = empirical_covariance(s.draw_base(100000));
  CHECK((emp - target).norm() / target.norm() < 0.03);
}

TEST_CASE("singular explicit covariance gets jitter") {
  HessianPair p{Matrix::Identity(2, 2), Matrix::Zero(2, 2)};
  ParamSampler s = ParamSampler::from_pair(p, 1);
  CHECK(s.covariance().norm() < 1e-10);
}

TEST_CASE("draws are deterministic and prefix-stable") {
  StatFactors f = random_factors(4, 4, 0.01, 6);
  ParamSampler a = ParamSampler::from_factors(f, 42);
  ParamSampler b = ParamSampler::from_factors(f, 42);
  Matrix d20 = a.draw_base(20, 3);
  CHECK(d20 == b.draw_base(20, 3));
  CHECK(d20.leftCols(7) == a.draw_base(7, 3));
  CHECK(d20 != a.draw_base(20, 4));
  CHECK(d20 != ParamSampler::from_factors(f, 43).draw_base(20, 3));
  CHECK_THROWS_AS(a.draw_base(0), InvalidArgument);
}

TEST_CASE("draw scaling") {
  Matrix base = Matrix::Constant(3, 5, 1.0);
  Matrix scaled = scale_draws(base, 10000, 1000000);
  CHECK(scaled(0, 0) == doctest::Approx(0.0099498743710662).epsilon(1e-12));
  CHECK(scale_draws(base, 50, 50).isZero(0.0));
}

TEST_CASE("full-model draws are centered on theta_n and use one scaled base") {
  StatFactors f = random_factors(3, 3, 0.0, 7);
  ParamSampler s = ParamSampler::from_factors(f, 11);
  const Vector theta = vec({1.0, -2.0, 0.5});
  Matrix full = sample_full_given_approx(s, theta, 400, 10000, 8, 2);
  Matrix expected = std::sqrt(1.0 / 400 - 1.0 / 10000) * s.draw_base(8, 2);
  expected.colwise() += theta;
  CHECK(full == expected);
  Matrix at_n = sample_full_given_approx(s, theta, 10000, 10000, 8, 2);
  for (Index c = 0; c < at_n.cols(); ++c) CHECK(at_n.col(c) == theta);
  CHECK_THROWS_AS(sample_full_given_approx(s, vec({1.0}), 10, 100, 4), InvalidArgument);
}
