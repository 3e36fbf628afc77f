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

#include "approxml/mcs.hpp"

namespace approxml {

enum class StatsMethod { closed_form, inverse_gradients, observed_fisher };

std::string to_string(StatsMethod method);
StatsMethod parse_stats_method(const std::string& name);

/// H: Jacobian of g_n at theta_n. J: Jacobian of g_n - r, i.e. H - J_r.
struct HessianPair {
  Matrix H;
  Matrix J;
};

/// Factors of J = U diag(s^2) U^T over the retained spectrum, with the L2
/// coefficient that turns them into H = J + beta I.
struct StatFactors {
  Matrix U;
  Vector s;  // descending, strictly positive
  double beta = 0.0;
  std::size_t n = 0;

  Index dim() const { return U.rows(); }
  Index rank() const { return U.cols(); }
  /// Diagonal of the sampler transform: s_i / (s_i^2 + beta).
  Vector lambda() const;
  Matrix implied_j() const;
};

/// Relative floor below which singular values are dropped.
inline constexpr double kSingularFloor = 1e-10;
/// Largest parameter dimension for which dense covariance matrices are formed.
inline constexpr std::size_t kExplicitCap = 2000;

/// Analytic H (lin: X^T X / n + beta I; lr: X^T Q X / n + beta I) and J = H - beta I.
HessianPair closed_form(const ModelClass& model, const Vector& theta, const Dataset& data);

/// Forward differences of g_n along eps * e_i; calls `grads` dp + 1 times.
HessianPair inverse_gradients(const ModelClass& model, const Vector& theta, const Dataset& data,
                              double eps = 1e-6);

/// Score-covariance factors from a single `grads` call. The regularizer term
/// is removed from each row, the rows are centered, and the SVD of
/// Q^T / sqrt(n) yields J as the per-example covariance of the scores.
/// `j_diag_eps` is added to every retained s_i^2.
StatFactors observed_fisher(const ModelClass& model, const Vector& theta, const Dataset& data,
                            double j_diag_eps = 0.0);

/// SVD of Q^T with the relative singular-value floor applied; Q^T Q equals
/// U diag(s^2) U^T on the retained spectrum.
StatFactors factorize_scores(const Matrix& q, double beta, std::size_t n, double j_diag_eps = 0.0);

/// 1/n - 1/N.
double variance_scale(std::size_t n, std::size_t population);

/// alpha H^-1 J H^-1 formed densely.
Matrix covariance_explicit(const HessianPair& pair, double alpha, std::size_t cap = kExplicitCap);
/// alpha U Lambda^2 U^T formed densely.
Matrix covariance_explicit(const StatFactors& factors, double alpha, std::size_t cap = kExplicitCap);

}  // namespace approxml
