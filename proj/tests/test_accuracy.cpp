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

#include "approxml/accuracy.hpp"
#include "approxml/optimizer.hpp"
#include "approxml/synthetic.hpp"
#include "test_util.hpp"

using namespace approxml;

namespace {

struct Fixture {
  std::unique_ptr<ModelClass> model;
  Dataset train;
  Dataset holdout;
  TrainedModel m;
  ParamSampler sampler;
};

Fixture lr_fixture(std::size_t n, std::size_t population) {
  SyntheticSpec s;
  s.kind = ModelKind::lr;
  s.rows = n + 500;
  s.dim = 5;
  s.seed = 21;
  DataSplit split_data = split(make_synthetic(s).data, 500.0 / static_cast<double>(n + 500), 3);
  auto model = make_model_class({ModelKind::lr, 0.001, 5});
  TrainedModel m = train(*model, split_data.train, population, OptimizerConfig{});
  ParamSampler sampler = ParamSampler::from_factors(observed_fisher(*model, m.theta, split_data.train), 5);
  return {std::move(model), split_data.train, split_data.holdout, std::move(m), std::move(sampler)};
}

}  // namespace

TEST_CASE("threshold values") {
  // Oracle: (1 - delta) / 0.95 + sqrt(log(0.95) / (-2 k)), evaluated independently.
  CHECK(conservative_threshold(0.1, 10000) == doctest::Approx(0.9489698781139909).epsilon(1e-14));
  CHECK(conservative_threshold(0.05, 100) == doctest::Approx(1.0160145706135928).epsilon(1e-14));
  CHECK(monte_carlo_slack(1) == doctest::Approx(std::sqrt(-std::log(0.95) / 2.0)));
  CHECK_THROWS_AS(conservative_threshold(0.0, 10), InvalidArgument);
  CHECK_THROWS_AS(conservative_threshold(1.0, 10), InvalidArgument);
  CHECK_THROWS_AS(monte_carlo_slack(0), InvalidArgument);
}

TEST_CASE("order statistic") {
  std::vector<double> v{0.5, 0.1, 0.4, 0.2, 0.3};
  CHECK(order_statistic_bound(v, 0.2) == 0.1);
  CHECK(order_statistic_bound(v, 0.21) == 0.2);
  CHECK(order_statistic_bound(v, 0.6) == 0.3);
  CHECK(order_statistic_bound(v, 1.0) == 0.5);
  CHECK(order_statistic_bound(v, 1.3) == 0.5);
  CHECK(order_statistic_bound(v, 0.0) == 0.1);
  CHECK_THROWS_AS(order_statistic_bound({}, 0.5), InvalidArgument);
}

TEST_CASE("a model trained on the full data has zero error bound") {
  Fixture f = lr_fixture(2000, 2000);
  AccuracyReport r = estimate_error_bound(*f.model, f.m, f.sampler, f.holdout, 0.05, 100);
  CHECK(r.epsilon == 0.0);
  CHECK(r.clamped);
  CHECK(r.v_samples.size() == 100);
}

TEST_CASE("the clamped case returns the largest sampled difference") {
  Fixture f = lr_fixture(2000, 200000);
  AccuracyReport r = estimate_error_bound(*f.model, f.m, f.sampler, f.holdout, 0.05, 200);
  REQUIRE(r.clamped);
  CHECK(r.epsilon == *std::max_element(r.v_samples.begin(), r.v_samples.end()));
  CHECK(r.epsilon > 0.0);
}

TEST_CASE("error bound is non-increasing in delta and matches v_of on the draws") {
  Fixture f = lr_fixture(2000, 200000);
  double previous = 2.0;
  for (double delta : {0.05, 0.1, 0.2, 0.4}) {
    AccuracyReport r = estimate_error_bound(*f.model, f.m, f.sampler, f.holdout, delta, 500, 7);
    CHECK(r.epsilon <= previous);
    previous = r.epsilon;
  }
  AccuracyReport r = estimate_error_bound(*f.model, f.m, f.sampler, f.holdout, 0.2, 50, 7);
  Matrix draws = sample_full_given_approx(f.sampler, f.m.theta, f.m.n, f.m.population, 50, 7);
  for (Index i = 0; i < 50; ++i) {
    CHECK(r.v_samples[static_cast<std::size_t>(i)] == v_of(*f.model, f.m.theta, draws.col(i), f.holdout));
  }
  CHECK(r.epsilon == order_statistic_bound(r.v_samples, r.tau));
}

TEST_CASE("error bound grows as the sample shrinks") {
  Fixture small = lr_fixture(500, 100000);
  Fixture large = lr_fixture(8000, 100000);
  const double a = estimate_error_bound(*small.model, small.m, small.sampler, small.holdout, 0.1, 500).epsilon;
  const double b = estimate_error_bound(*large.model, large.m, large.sampler, large.holdout, 0.1, 500).epsilon;
  CHECK(a > b);
}

TEST_CASE("invalid inputs") {
  Fixture f = lr_fixture(500, 1000);
  CHECK_THROWS_AS(estimate_error_bound(*f.model, f.m, f.sampler, f.holdout, 0.05, 1), InvalidArgument);
  Dataset empty(FeatureMatrix(FeatureMatrix::Dense(0, 5)), Vector(0));
  CHECK_THROWS_AS(estimate_error_bound(*f.model, f.m, f.sampler, empty, 0.05, 10), InvalidArgument);
}
