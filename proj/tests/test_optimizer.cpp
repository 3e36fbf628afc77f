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

#include <limits>

#include "approxml/optimizer.hpp"
#include "approxml/synthetic.hpp"
#include "test_util.hpp"

using namespace approxml;
using approxml::testing::dense;
using approxml::testing::random_problem;
using approxml::testing::vec;

namespace {

Dataset planted(ModelKind kind, std::size_t rows, std::size_t dim, std::uint64_t seed) {
  SyntheticSpec s;
  s.kind = kind;
  s.rows = rows;
  s.dim = dim;
  s.seed = seed;
  return make_synthetic(s).data;
}

}  // namespace

TEST_CASE("exact-fit least squares reaches the closed form") {
  auto lin = make_model_class({ModelKind::lin, 0.0, 1});
  OptimizeResult r = minimize(*lin, dense({{1}, {2}}, vec({2, 4})), OptimizerConfig{});
  CHECK(r.converged());
  CHECK(std::abs(r.theta(0) - 2.0) < 1e-6);
}

TEST_CASE("separable logistic data converges with a small ridge") {
  Dataset d = dense({{1, 2}, {2, 1}, {-1, -2}, {-2, -1}, {3, 1}, {-1, -3}}, vec({1, 1, 0, 0, 1, 0}));
  auto lr = make_model_class({ModelKind::lr, 0.001, 2});
  OptimizerConfig config;
  config.max_iters = 2000;
  OptimizeResult r = minimize(*lr, d, config);
  CHECK(r.converged());
  CHECK(r.grad_norm <= 1e-6);
  CHECK(lr->gradient(r.theta, d).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("iteration cap returns the partial iterate with a flag") {
  Dataset d = planted(ModelKind::lr, 500, 5, 3);
  auto lr = make_model_class({ModelKind::lr, 0.001, 5});
  OptimizerConfig config;
  config.max_iters = 1;
  OptimizeResult r = minimize(*lr, d, config);
  CHECK(r.status == OptimizeStatus::max_iterations);
  CHECK_FALSE(r.converged());
  CHECK(r.iterations == 1);
  CHECK(r.objective < std::log(2.0));
  TrainedModel m = train(*lr, d, 500, config);
  CHECK_FALSE(m.converged);
}

TEST_CASE("accepted steps never increase the objective") {
  for (ModelKind kind : {ModelKind::lin, ModelKind::lr, ModelKind::me}) {
    SyntheticSpec s;
    s.kind = kind;
    s.rows = 800;
    s.dim = 6;
    s.seed = 5;
    Dataset d = make_synthetic(s).data;
    ModelClassSpec spec{kind, 0.001, 6};
    spec.classes = kind == ModelKind::me ? 3 : 2;
    auto model = make_model_class(spec);
    OptimizeResult r = minimize(*model, d, OptimizerConfig{});
    CHECK(r.converged());
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
  }
}

TEST_CASE("runs are deterministic") {
  Dataset d = planted(ModelKind::me, 600, 4, 9);
  ModelClassSpec spec{ModelKind::me, 0.001, 4};
  spec.classes = 3;
  auto model = make_model_class(spec);
  OptimizeResult a = minimize(*model, d, OptimizerConfig{});
  OptimizeResult b = minimize(*model, d, OptimizerConfig{});
  CHECK(a.trace == b.trace);
  CHECK(a.theta == b.theta);
}

TEST_CASE("different starting points reach the same strongly convex optimum") {
  Rng rng(77);
  std::normal_distribution<double> normal;
  for (ModelKind kind : {ModelKind::lin, ModelKind::lr, ModelKind::me}) {
    CAPTURE(to_string(kind));
    ModelClassSpec spec{kind, 0.01, 5};
    spec.classes = kind == ModelKind::me ? 3 : 2;
    auto model = make_model_class(spec);
    Dataset d = random_problem(kind, 400, 5, spec.classes, rng);
    Vector start(static_cast<Index>(param_dim(spec)));
    for (Index i = 0; i < start.size(); ++i) start(i) = 2.0 * normal(rng);
    OptimizerConfig config;
    OptimizeResult a = minimize(*model, d, config);
    OptimizeResult b = minimize(*model, d, config, start);
    REQUIRE(a.converged());
    REQUIRE(b.converged());
    CHECK((a.theta - b.theta).lpNorm<Eigen::Infinity>() < 10 * config.grad_tol);
  }
}

TEST_CASE("BFGS and L-BFGS agree and the automatic choice follows dimension") {
  Dataset d = planted(ModelKind::lr, 1000, 8, 12);
  auto lr = make_model_class({ModelKind::lr, 0.001, 8});
  OptimizerConfig bfgs;
  bfgs.method = OptimizerMethod::bfgs;
  OptimizerConfig lbfgs;
  lbfgs.method = OptimizerMethod::lbfgs;
  OptimizeResult a = minimize(*lr, d, bfgs);
  OptimizeResult b = minimize(*lr, d, lbfgs);
  CHECK(a.method == OptimizerMethod::bfgs);
  CHECK(b.method == OptimizerMethod::lbfgs);
  CHECK((a.theta - b.theta).lpNorm<Eigen::Infinity>() < 1e-5);
  CHECK(minimize(*lr, d, OptimizerConfig{}).method == OptimizerMethod::bfgs);

  ModelClassSpec wide{ModelKind::me, 0.001, 25};
  wide.classes = 4;
  SyntheticSpec s;
  s.kind = ModelKind::me;
  s.rows = 500;
  s.dim = 25;
  s.classes = 4;
  auto me = make_model_class(wide);
  CHECK(minimize(*me, make_synthetic(s).data, OptimizerConfig{}).method == OptimizerMethod::lbfgs);
}

TEST_CASE("PPCA training reaches the closed-form likelihood") {
  SyntheticSpec s;
  s.kind = ModelKind::ppca;
  s.rows = 3000;
  s.dim = 6;
  s.factors = 2;
  s.seed = 4;
  Dataset d = make_synthetic(s).data;
  ModelClassSpec spec{ModelKind::ppca, 0.0, 6};
  spec.factors = 2;
  auto model = make_model_class(spec);
  OptimizerConfig config;
  config.max_iters = 5000;
  OptimizeResult r = minimize(*model, d, config);
  CHECK(r.converged());
  CHECK(r.objective == doctest::Approx(model->objective(model->solve(d), d)).epsilon(1e-9));
}

TEST_CASE("non-finite start is an error") {
  auto lr = make_model_class({ModelKind::lr, 0.0, 2});
  Dataset d = dense({{1, 2}}, vec({1}));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(minimize(*lr, d, OptimizerConfig{}, vec({nan, 0})), NumericalError);
  ModelClassSpec pp{ModelKind::ppca, 0.0, 3};
  pp.factors = 1;
  auto ppca = make_model_class(pp);
  CHECK_THROWS_AS(minimize(*ppca, dense({{1, 2, 3}, {1, 0, 0}}), OptimizerConfig{}, vec({1, 0, 0, -1})),
                  NumericalError);
}

TEST_CASE("configuration validation") {
  OptimizerConfig c;
  c.grad_tol = 0.0;
  CHECK_THROWS_AS(validate(c), InvalidArgument);
  c.grad_tol = 1e-6;
  c.max_iters = 0;
  CHECK_THROWS_AS(validate(c), InvalidArgument);
  CHECK(parse_optimizer_method("lbfgs") == OptimizerMethod::lbfgs);
  CHECK_THROWS_AS(parse_optimizer_method("adam"), InvalidArgument);
}

TEST_CASE("invocation counter and trained model provenance") {
  Dataset d = planted(ModelKind::lr, 200, 3, 1);
  auto lr = make_model_class({ModelKind::lr, 0.001, 3});
  const std::size_t before = optimizer_invocations();
  TrainedModel m = train(*lr, d, 1000, OptimizerConfig{});
  CHECK(optimizer_invocations() == before + 1);
  CHECK(m.n == 200);
  CHECK(m.population == 1000);
  CHECK(m.converged);
  CHECK(m.grad_norm <= 1e-6);
  CHECK_THROWS_AS(train(*lr, d, 100, OptimizerConfig{}), InvalidArgument);
}
