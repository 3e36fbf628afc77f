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

#include <string>
#include <vector>

#include "approxml/accuracy.hpp"

namespace approxml {

/// k joint draws (theta_n,i, theta_N,i), one per column.
struct JointDraws {
  Matrix theta_n;
  Matrix theta_full;
  double alpha1 = 0.0;  // 1/n0 - 1/n
  double alpha2 = 0.0;  // 1/n - 1/N
};

/// Standard-normal-derived base draws shared by every probe of a search.
struct BaseDraws {
  Matrix first;   // stage 1: theta_n | theta_0
  Matrix second;  // stage 2: theta_N | theta_n
};

BaseDraws draw_joint_base(const ParamSampler& sampler, std::size_t k, std::uint64_t stream = 0);

/// Two-stage sampling: theta_n,i ~ N(theta_0, alpha1 C), theta_N,i ~ N(theta_n,i, alpha2 C).
JointDraws joint_sample(const Vector& theta0, const ParamSampler& sampler, std::size_t n0, std::size_t n,
                        std::size_t population, std::size_t k, std::uint64_t stream = 0);
JointDraws joint_sample(const Vector& theta0, const BaseDraws& base, std::size_t n0, std::size_t n,
                        std::size_t population);

struct Probe {
  std::size_t n = 0;
  /// Fraction of joint draws whose difference is within epsilon.
  double raw = 0.0;
  /// 0.95 * (raw - sqrt(log 0.95 / (-2k))).
  double conservative = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  bool pass = false;
};

/// Probability estimate that a size-n model stays within eps of the full model.
/// `pass` is conservative >= 1 - delta; when that target exceeds what k draws
/// can certify (tau >= 1) it requires every draw to be within eps.
Probe prob_within(const ModelClass& model, const Vector& theta0, const ParamSampler& sampler,
                  const Dataset& holdout, std::size_t n0, std::size_t n, std::size_t population, double eps,
                  double delta, std::size_t k, std::uint64_t stream = 0);
Probe prob_within(const ModelClass& model, const Vector& theta0, const BaseDraws& base, const Dataset& holdout,
                  std::size_t n0, std::size_t n, std::size_t population, double eps, double delta);

struct SizeEstimate {
  std::size_t n_star = 0;
  std::vector<Probe> probes;
  std::size_t k = 0;
  /// No probed size below N met the target; N is returned.
  bool saturated = false;
};

/// Smallest probed n in [n0, N] meeting the target, by binary search over a
/// single set of base draws rescaled per probe. Trains no models.
SizeEstimate min_sample_size(const ModelClass& model, const Vector& theta0, const ParamSampler& sampler,
                             const Dataset& holdout, std::size_t n0, std::size_t population, double eps,
                             double delta, std::size_t k, std::uint64_t stream = 0);

/// Upper bound on the number of probes `min_sample_size` makes.
std::size_t max_probe_count(std::size_t n0, std::size_t population);

enum class BaselineStrategy { fixed_ratio, relative_ratio, inc_estimator };

std::string to_string(BaselineStrategy strategy);
BaselineStrategy parse_baseline_strategy(const std::string& name);

/// fixed_ratio: ceil(0.01 N); relative_ratio: ceil((1 - eps) 0.1 N);
/// inc_estimator: 1000 * iteration^2. Results are clamped to [1, N].
std::size_t baseline_size(BaselineStrategy strategy, double eps, std::size_t population, std::size_t iteration = 1);

}  // namespace approxml
