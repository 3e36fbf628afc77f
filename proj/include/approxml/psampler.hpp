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

#include "approxml/stats.hpp"

namespace approxml {

/// Draws from N(0, H^-1 J H^-1) as L z with z standard normal.
///
/// Factor mode uses L = U Lambda from StatFactors (Lambda_ii = s_i / (s_i^2 + beta)),
/// valid when the regularizer is none or L2. Explicit mode uses the Cholesky
/// factor of the dense covariance.
class ParamSampler {
 public:
  enum class Mode { factor, explicit_cholesky };

  static ParamSampler from_factors(const StatFactors& factors, std::uint64_t seed);
  static ParamSampler from_pair(const HessianPair& pair, std::uint64_t seed);

  Mode mode() const { return mode_; }
  Index dim() const { return transform_.rows(); }
  std::uint64_t seed() const { return seed_; }
  /// L, with L L^T = H^-1 J H^-1.
  const Matrix& transform() const { return transform_; }
  Matrix covariance() const { return transform_ * transform_.transpose(); }

  /// dp x k matrix of base draws. The same (k, stream) always yields the same
  /// draws, and draws for k are a column prefix of draws for k' > k.
  Matrix draw_base(std::size_t k, std::uint64_t stream = 0) const;

 private:
  ParamSampler(Mode mode, Matrix transform, std::uint64_t seed)
      : mode_(mode), transform_(std::move(transform)), seed_(seed) {}

  Mode mode_;
  Matrix transform_;
  std::uint64_t seed_;
};

/// Multiplies base draws by sqrt(1/n - 1/N).
Matrix scale_draws(const Matrix& base, std::size_t n, std::size_t population);

/// k draws of the full-data parameter given theta_n: theta_n + scaled base draws.
Matrix sample_full_given_approx(const ParamSampler& sampler, const Vector& theta_n, std::size_t n,
                                std::size_t population, std::size_t k, std::uint64_t stream = 0);

}  // namespace approxml
