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

#include <vector>

#include "approxml/psampler.hpp"

namespace approxml {

struct AccuracyReport {
  double epsilon = 0.0;
  double delta = 0.0;
  std::size_t k = 0;
  /// Required fraction of draws within epsilon: (1-delta)/0.95 + sqrt(log 0.95 / (-2k)).
  double tau = 0.0;
  std::vector<double> v_samples;
  /// tau >= 1: epsilon is the largest sampled difference.
  bool clamped = false;
};

/// Monte-Carlo draw fraction that makes the (epsilon, delta) statement hold.
double conservative_threshold(double delta, std::size_t k);

/// Slack subtracted from an empirical fraction of k draws: sqrt(log 0.95 / (-2k)).
double monte_carlo_slack(std::size_t k);

/// The ceil(min(tau, 1) * k)-th smallest value (1-based) of `values`.
double order_statistic_bound(std::vector<double> values, double tau);

/// Difference between the models with parameters a and b on the holdout.
double v_of(const ModelClass& model, const Vector& a, const Vector& b, const Dataset& holdout);

/// Error bound epsilon with Pr[v(m_n) <= epsilon] >= 1 - delta, estimated
/// from k draws of the full-data parameter conditioned on m_n.
AccuracyReport estimate_error_bound(const ModelClass& model, const TrainedModel& m_n, const ParamSampler& sampler,
                                    const Dataset& holdout, double delta, std::size_t k,
                                    std::uint64_t stream = 0);

}  // namespace approxml
