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

#include "approxml/sizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>

namespace approxml {

BaseDraws draw_joint_base(const ParamSampler& sampler, std::size_t k, std::uint64_t stream) {
  return {sampler.draw_base(k, 2 * stream), sampler.draw_base(k, 2 * stream + 1)};
}

JointDraws joint_sample(const Vector& theta0, const BaseDraws& base, std::size_t n0, std::size_t n,
                        std::size_t population) {
  if (n < n0) throw InvalidArgument("joint sampling needs n0 <= n");
  if (n > population) throw InvalidArgument("joint sampling needs n <= N");
  if (theta0.size() != base.first.rows()) throw InvalidArgument("theta_0 dimension does not match draws");
  JointDraws out;
  out.alpha1 = 1.0 / static_cast<double>(n0) - 1.0 / static_cast<double>(n);
  out.alpha2 = variance_scale(n, population);
  out.theta_n = std::sqrt(out.alpha1) * base.first;
  out.theta_n.colwise() += theta0;
  out.theta_full = out.theta_n + std::sqrt(out.alpha2) * base.second;
  return out;
}

JointDraws joint_sample(const Vector& theta0, const ParamSampler& sampler, std::size_t n0, std::size_t n,
                        std::size_t population, std::size_t k, std::uint64_t stream) {
  return joint_sample(theta0, draw_joint_base(sampler, k, stream), n0, n, population);
}

namespace {

// Largest projected block (entries) kept in memory; bigger problems evaluate
// each probe directly.
constexpr double kProjectionCap = 1.6e7;

// Holdout projections of theta_0 and both base draw sets. A probe then costs
// O(rows * k) instead of two products with the holdout features.
struct Projection {
  Matrix p0;
  Matrix p1;
  Matrix p2;
};

std::optional<Projection> try_project(const ModelClass& model, const Vector& theta0, const BaseDraws& base,
                                      const Dataset& holdout) {
  const Index outputs = model.linear_outputs();
  if (outputs == 0) return std::nullopt;
  const double entries =
      static_cast<double>(holdout.n_rows()) * static_cast<double>(base.first.cols()) * static_cast<double>(outputs);
  if (entries > kProjectionCap) return std::nullopt;
  return Projection{model.project(theta0, holdout.features()), model.project(base.first, holdout.features()),
                    model.project(base.second, holdout.features())};
}

Probe probe_at(const ModelClass& model, const Vector& theta0, const BaseDraws& base, const Dataset& holdout,
               const std::optional<Projection>& projection, std::size_t n0, std::size_t n, std::size_t population,
               double eps, double delta) {
  const auto k = static_cast<std::size_t>(base.first.cols());
  const double tau = conservative_threshold(delta, k);
  Probe p;
  p.n = n;
  Vector v;
  if (projection) {
    if (n < n0 || n > population) throw InvalidArgument("probe size must lie in [n0, N]");
    p.alpha1 = 1.0 / static_cast<double>(n0) - 1.0 / static_cast<double>(n);
    p.alpha2 = variance_scale(n, population);
    v = model.diff_projected(projection->p0, projection->p1, projection->p2, std::sqrt(p.alpha1),
                             std::sqrt(p.alpha2));
  } else {
    JointDraws draws = joint_sample(theta0, base, n0, n, population);
    p.alpha1 = draws.alpha1;
    p.alpha2 = draws.alpha2;
    v = model.diff_pairs(draws.theta_n, draws.theta_full, holdout);
  }
  p.raw = static_cast<double>((v.array() <= eps).count()) / static_cast<double>(k);
  p.conservative = 0.95 * (p.raw - monte_carlo_slack(k));
  p.pass = p.raw >= std::min(tau, 1.0);
  return p;
}

}  // namespace

Probe prob_within(const ModelClass& model, const Vector& theta0, const BaseDraws& base, const Dataset& holdout,
                  std::size_t n0, std::size_t n, std::size_t population, double eps, double delta) {
  return probe_at(model, theta0, base, holdout, try_project(model, theta0, base, holdout), n0, n, population, eps,
                  delta);
}

Probe prob_within(const ModelClass& model, const Vector& theta0, const ParamSampler& sampler,
                  const Dataset& holdout, std::size_t n0, std::size_t n, std::size_t population, double eps,
                  double delta, std::size_t k, std::uint64_t stream) {
  return prob_within(model, theta0, draw_joint_base(sampler, k, stream), holdout, n0, n, population, eps, delta);
}

std::size_t max_probe_count(std::size_t n0, std::size_t population) {
  if (population <= n0 + 1) return 1;
  return static_cast<std::size_t>(std::bit_width(population - n0 - 1)) + 1;
}

SizeEstimate min_sample_size(const ModelClass& model, const Vector& theta0, const ParamSampler& sampler,
                             const Dataset& holdout, std::size_t n0, std::size_t population, double eps,
                             double delta, std::size_t k, std::uint64_t stream) {
  if (n0 < 1 || n0 > population) throw InvalidArgument("initial sample size must lie in [1, N]");
  if (k < 2) throw InvalidArgument("size estimation needs k >= 2 draws");
  SizeEstimate out;
  out.k = k;
  const BaseDraws base = draw_joint_base(sampler, k, stream);
  const auto projection = try_project(model, theta0, base, holdout);
  auto probe = [&](std::size_t n) {
    out.probes.push_back(probe_at(model, theta0, base, holdout, projection, n0, n, population, eps, delta));
    return out.probes.back().pass;
  };

  if (probe(n0)) {
    out.n_star = n0;
    return out;
  }
  // Invariant: lo fails; hi is N (trivially within eps) or a probed pass.
  std::size_t lo = n0;
  std::size_t hi = population;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (probe(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.n_star = hi;
  out.saturated = hi == population;
  return out;
}

std::string to_string(BaselineStrategy strategy) {
  switch (strategy) {
    case BaselineStrategy::fixed_ratio: return "fixed_ratio";
    case BaselineStrategy::relative_ratio: return "relative_ratio";
    case BaselineStrategy::inc_estimator: return "inc_estimator";
  }
  return "unknown";
}

BaselineStrategy parse_baseline_strategy(const std::string& name) {
  if (name == "fixed_ratio") return BaselineStrategy::fixed_ratio;
  if (name == "relative_ratio") return BaselineStrategy::relative_ratio;
  if (name == "inc_estimator") return BaselineStrategy::inc_estimator;
  throw InvalidArgument("unknown baseline strategy '" + name + "'");
}

std::size_t baseline_size(BaselineStrategy strategy, double eps, std::size_t population, std::size_t iteration) {
  if (population < 1) throw InvalidArgument("population must be >= 1");
  const double big_n = static_cast<double>(population);
  // The 1e-9 guard keeps exact products such as 0.95 * 0.1 * 1e6 from rounding up.
  auto ceil_count = [](double x) { return static_cast<std::size_t>(std::ceil(x - 1e-9)); };
  std::size_t n = 0;
  switch (strategy) {
    case BaselineStrategy::fixed_ratio:
      n = ceil_count(0.01 * big_n);
      break;
    case BaselineStrategy::relative_ratio:
      if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in [0, 1]");
      n = ceil_count((1.0 - eps) * 0.1 * big_n);
      break;
    case BaselineStrategy::inc_estimator:
      if (iteration < 1) throw InvalidArgument("inc_estimator iteration must be >= 1");
      n = 1000 * iteration * iteration;
      break;
  }
  return std::clamp<std::size_t>(n, 1, population);
}

}  // namespace approxml
