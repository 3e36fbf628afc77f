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

#include <atomic>
#include <memory>
#include <optional>
#include <string>

#include "approxml/common.hpp"
#include "approxml/data.hpp"

namespace approxml {

enum class ModelKind { lin, lr, me, ppca };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

/// User-facing description of a model class.
///
/// Parameter layouts (flat vector theta):
///   lin, lr : d weights.
///   me      : column-major d x K weight matrix, theta[k*d + j] is feature j of class k.
///   ppca    : column-major d x q factor matrix followed by the noise variance.
struct ModelClassSpec {
  ModelKind kind = ModelKind::lr;
  double beta = 0.001;
  std::size_t features = 0;
  std::size_t classes = 2;
  std::size_t factors = 10;
};

void validate(const ModelClassSpec& spec);
std::size_t param_dim(const ModelClassSpec& spec);
std::string layout_description(const ModelClassSpec& spec);

/// Objective value and mean gradient evaluated together.
struct Evaluation {
  double value = 0.0;
  Vector gradient;
};

/// Model class specification: the per-example gradient contract plus the
/// prediction, difference, and optional closed-form pieces.
///
/// The objective is f_n(theta) = mean_i loss(theta; x_i, y_i) + R(theta) with
/// R(theta) = beta/2 |theta|^2 (zero for PPCA). `grads` returns one row per
/// example holding q(theta; x_i, y_i) + r(theta); `evaluate` returns the same
/// mean without materializing the rows.
class ModelClass {
 public:
  explicit ModelClass(ModelClassSpec spec);
  virtual ~ModelClass() = default;
  ModelClass(const ModelClass&) = delete;
  ModelClass& operator=(const ModelClass&) = delete;

  const ModelClassSpec& spec() const { return spec_; }
  std::size_t param_dim() const { return dim_; }
  virtual bool supervised() const { return true; }
  virtual bool classification() const { return false; }

  /// n x dp matrix; row i is q(theta; x_i, y_i) + r(theta).
  Matrix grads(const Vector& theta, const Dataset& data) const;
  /// Mean of `grads` rows together with f_n(theta).
  Evaluation evaluate(const Vector& theta, const Dataset& data) const;
  double objective(const Vector& theta, const Dataset& data) const;
  Vector gradient(const Vector& theta, const Dataset& data) const;

  /// r(theta), the gradient of the regularizer.
  Vector regularizer_gradient(const Vector& theta) const;
  /// Coefficient of the L2 term actually applied (zero for PPCA).
  virtual double regularizer_beta() const { return spec_.beta; }

  /// Analytic Jacobian of g_n at theta (lin and lr only).
  virtual Matrix hessian(const Vector& theta, const Dataset& data) const;

  /// One prediction per feature row: class index or real value.
  virtual Vector predict(const Vector& theta, const FeatureMatrix& x) const;

  /// Prediction difference between two parameter vectors on the holdout.
  double diff(const Vector& a, const Vector& b, const Dataset& holdout) const;
  /// Column-wise diff of two dp x k parameter matrices.
  virtual Vector diff_pairs(const Matrix& a, const Matrix& b, const Dataset& holdout) const = 0;

  /// Outputs per example when predictions depend on theta only through
  /// X * reshape(theta, d, outputs); zero for other model classes.
  virtual Index linear_outputs() const { return 0; }
  /// X * reshape(theta_c) for every column c, stacked as n x (k * outputs).
  Matrix project(const Matrix& thetas, const FeatureMatrix& x) const;
  /// diff_pairs in projected form: a_c = p0 + s1 * p1_c and b_c = a_c + s2 * p2_c,
  /// where p0 is n x outputs and p1, p2 are n x (k * outputs).
  virtual Vector diff_projected(const Matrix& p0, const Matrix& p1, const Matrix& p2, double s1, double s2) const;

  /// Closed-form optimum (lin and ppca only).
  virtual Vector solve(const Dataset& data) const;

  /// Whether theta lies in the domain of the objective.
  virtual bool feasible(const Vector& /*theta*/) const { return true; }
  /// Starting point for iterative training.
  virtual Vector initial_theta(std::uint64_t seed) const;

  std::size_t grads_calls() const { return grads_calls_.load(); }
  std::size_t evaluate_calls() const { return evaluate_calls_.load(); }

 protected:
  /// n x dp matrix of unregularized per-example scores q(theta; x_i, y_i).
  virtual Matrix scores(const Vector& theta, const Dataset& data) const = 0;
  /// Mean loss and mean score, without the regularizer.
  virtual Evaluation mean_loss(const Vector& theta, const Dataset& data) const = 0;

  /// Difference of two n x outputs prediction blocks (linear-output models).
  virtual double diff_outputs(const Matrix& a, const Matrix& b) const;

  void check_projection(const Matrix& p0, const Matrix& p1, const Matrix& p2) const;
  void check_theta(const Vector& theta) const;
  void check_data(const Dataset& data, bool need_labels) const;

 private:
  ModelClassSpec spec_;
  std::size_t dim_;
  mutable std::atomic<std::size_t> grads_calls_{0};
  mutable std::atomic<std::size_t> evaluate_calls_{0};
};

std::unique_ptr<ModelClass> make_model_class(const ModelClassSpec& spec);

/// Parameters of a trained model with provenance.
struct TrainedModel {
  ModelClassSpec spec;
  Vector theta;
  std::size_t n = 0;
  std::size_t population = 0;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  bool converged = true;
};

}  // namespace approxml
