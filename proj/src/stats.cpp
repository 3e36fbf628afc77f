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

#include "approxml/stats.hpp"

#include <cmath>

namespace approxml {

std::string to_string(StatsMethod method) {
  switch (method) {
    case StatsMethod::closed_form: return "closed-form";
    case StatsMethod::inverse_gradients: return "inverse-gradients";
    case StatsMethod::observed_fisher: return "observed-fisher";
  }
  return "unknown";
}

StatsMethod parse_stats_method(const std::string& name) {
  if (name == "closed-form") return StatsMethod::closed_form;
  if (name == "inverse-gradients") return StatsMethod::inverse_gradients;
  if (name == "observed-fisher") return StatsMethod::observed_fisher;
  throw InvalidArgument("unknown statistics method '" + name +
                        "' (expected closed-form, inverse-gradients, observed-fisher)");
}

Vector StatFactors::lambda() const {
  return (s.array() / (s.array().square() + beta)).matrix();
}

Matrix StatFactors::implied_j() const {
  return U * s.array().square().matrix().asDiagonal() * U.transpose();
}

HessianPair closed_form(const ModelClass& model, const Vector& theta, const Dataset& data) {
  HessianPair out;
  out.H = model.hessian(theta, data);
  out.J = out.H;
  out.J.diagonal().array() -= model.regularizer_beta();
  return out;
}

HessianPair inverse_gradients(const ModelClass& model, const Vector& theta, const Dataset& data, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("inverse-gradients step must be > 0");
  const auto dp = static_cast<Index>(model.param_dim());
  const Vector g0 = model.grads(theta, data).colwise().mean().transpose();
  Matrix r(dp, dp);
  for (Index i = 0; i < dp; ++i) {
    Vector shifted = theta;
    shifted(i) += eps;
    Vector gi = model.grads(shifted, data).colwise().mean().transpose();
    if (!gi.allFinite()) throw NumericalError("perturbed gradient is not finite along coordinate " + std::to_string(i));
    r.col(i) = gi - g0;
  }
  HessianPair out;
  out.H = 0.5 * (r + r.transpose()) / eps;
  out.J = out.H;
  out.J.diagonal().array() -= model.regularizer_beta();
  return out;
}

StatFactors factorize_scores(const Matrix& q, double beta, std::size_t n, double j_diag_eps) {
  if (q.size() == 0 || q.isZero(0.0)) throw NumericalError("score matrix is all zero; statistics are degenerate");
  // Q = A S B^T, so Q^T = B S A^T and the left factor of Q^T is B.
  Eigen::BDCSVD<Matrix> svd(q, Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("singular value decomposition did not converge");
  const Vector& sv = svd.singularValues();
  const double floor = sv(0) * kSingularFloor;
  Index keep = 0;
  while (keep < sv.size() && sv(keep) > floor) ++keep;
  StatFactors f;
  f.U = svd.matrixV().leftCols(keep);
  f.s = sv.head(keep);
  if (j_diag_eps > 0.0) f.s = (f.s.array().square() + j_diag_eps).sqrt().matrix();
  f.beta = beta;
  f.n = n;
  return f;
}

StatFactors observed_fisher(const ModelClass& model, const Vector& theta, const Dataset& data, double j_diag_eps) {
  const std::size_t n = data.n_rows();
  if (n < 2) throw InvalidArgument("observed Fisher needs at least two examples");
  Matrix q = model.grads(theta, data);
  const double beta = model.regularizer_beta();
  if (beta != 0.0) q.rowwise() -= model.regularizer_gradient(theta).transpose();
  q.rowwise() -= q.colwise().mean();
  q /= std::sqrt(static_cast<double>(n));
  return factorize_scores(q, beta, n, j_diag_eps);
}

double variance_scale(std::size_t n, std::size_t population) {
  if (n < 1 || n > population) {
    throw InvalidArgument("sample size " + std::to_string(n) + " outside [1, " + std::to_string(population) + "]");
  }
  return 1.0 / static_cast<double>(n) - 1.0 / static_cast<double>(population);
}

Matrix covariance_explicit(const HessianPair& pair, double alpha, std::size_t cap) {
  if (static_cast<std::size_t>(pair.H.rows()) > cap) {
    throw InvalidArgument("explicit covariance limited to dimension " + std::to_string(cap));
  }
  Eigen::LLT<Matrix> llt(pair.H);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("H is not positive definite (singular or indefinite); use beta > 0");
  }
  Matrix h_inv = llt.solve(Matrix::Identity(pair.H.rows(), pair.H.cols()));
  Matrix cov = alpha * (h_inv * pair.J * h_inv);
  return 0.5 * (cov + cov.transpose());
}

Matrix covariance_explicit(const StatFactors& factors, double alpha, std::size_t cap) {
  if (static_cast<std::size_t>(factors.dim()) > cap) {
    throw InvalidArgument("explicit covariance limited to dimension " + std::to_string(cap));
  }
  Matrix l = factors.U * factors.lambda().asDiagonal();
  return alpha * (l * l.transpose());
}

}  // namespace approxml
