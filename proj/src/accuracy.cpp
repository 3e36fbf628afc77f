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

#include "approxml/accuracy.hpp"

#include <algorithm>
#include <cmath>

namespace approxml {

double monte_carlo_slack(std::size_t k) {
  if (k < 1) throw InvalidArgument("draw count must be >= 1");
  return std::sqrt(std::log(0.95) / (-2.0 * static_cast<double>(k)));
}

double conservative_threshold(double delta, std::size_t k) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  return (1.0 - delta) / 0.95 + monte_carlo_slack(k);
}

double order_statistic_bound(std::vector<double> values, double tau) {
  if (values.empty()) throw InvalidArgument("no samples");
  const double k = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(std::min(tau, 1.0) * k - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

double v_of(const ModelClass& model, const Vector& a, const Vector& b, const Dataset& holdout) {
  return model.diff(a, b, holdout);
}

AccuracyReport estimate_error_bound(const ModelClass& model, const TrainedModel& m_n, const ParamSampler& sampler,
                                    const Dataset& holdout, double delta, std::size_t k, std::uint64_t stream) {
  if (k < 2) throw InvalidArgument("accuracy estimation needs k >= 2 draws");
  AccuracyReport report;
  report.delta = delta;
  report.k = k;
  report.tau = conservative_threshold(delta, k);
  report.clamped = report.tau >= 1.0;
  if (model.supervised() && holdout.n_rows() == 0) throw InvalidArgument("holdout set is empty");

  Matrix full = sample_full_given_approx(sampler, m_n.theta, m_n.n, m_n.population, k, stream);
  Matrix approx = m_n.theta.replicate(1, static_cast<Index>(k));
  Vector v = model.diff_pairs(approx, full, holdout);
  report.v_samples.assign(v.data(), v.data() + v.size());
  report.epsilon = order_statistic_bound(report.v_samples, report.tau);
  return report;
}

}  // namespace approxml
