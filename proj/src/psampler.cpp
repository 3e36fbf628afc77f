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

#include "approxml/psampler.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace approxml {

ParamSampler ParamSampler::from_factors(const StatFactors& factors, std::uint64_t seed) {
  if (factors.U.cols() != factors.s.size()) throw InvalidArgument("factor shapes disagree");
  if (!(factors.beta >= 0.0)) throw InvalidArgument("factor path requires an L2 (or no) regularizer");
  return ParamSampler(Mode::factor, factors.U * factors.lambda().asDiagonal(), seed);
}

ParamSampler ParamSampler::from_pair(const HessianPair& pair, std::uint64_t seed) {
  Matrix cov = covariance_explicit(pair, 1.0);
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    const double jitter = 1e-12 * std::max(1.0, cov.diagonal().maxCoeff());
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", jitter);
    log_warning(std::string("covariance not positive definite; adding jitter ") + buf);
    cov.diagonal().array() += jitter;
    llt.compute(cov);
    if (llt.info() != Eigen::Success) throw NumericalError("Cholesky of H^-1 J H^-1 failed after jitter");
  }
  return ParamSampler(Mode::explicit_cholesky, llt.matrixL(), seed);
}

Matrix ParamSampler::draw_base(std::size_t k, std::uint64_t stream) const {
  if (k < 1) throw InvalidArgument("draw count must be >= 1");
  Rng rng(derive_seed(seed_, stream));
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(transform_.cols(), static_cast<Index>(k));
  for (Index c = 0; c < z.cols(); ++c) {
    for (Index r = 0; r < z.rows(); ++r) z(r, c) = normal(rng);
  }
  return transform_ * z;
}

Matrix scale_draws(const Matrix& base, std::size_t n, std::size_t population) {
  return std::sqrt(variance_scale(n, population)) * base;
}

Matrix sample_full_given_approx(const ParamSampler& sampler, const Vector& theta_n, std::size_t n,
                                std::size_t population, std::size_t k, std::uint64_t stream) {
  if (theta_n.size() != sampler.dim()) throw InvalidArgument("theta_n dimension does not match sampler");
  Matrix draws = scale_draws(sampler.draw_base(k, stream), n, population);
  draws.colwise() += theta_n;
  return draws;
}

}  // namespace approxml
