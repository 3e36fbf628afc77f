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

#include "approxml/mcs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace approxml {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::lin: return "lin";
    case ModelKind::lr: return "lr";
    case ModelKind::me: return "me";
    case ModelKind::ppca: return "ppca";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "lin") return ModelKind::lin;
  if (name == "lr") return ModelKind::lr;
  if (name == "me") return ModelKind::me;
  if (name == "ppca") return ModelKind::ppca;
  throw InvalidArgument("unknown model class '" + name + "' (expected lin, lr, me, ppca)");
}

void validate(const ModelClassSpec& spec) {
  if (!(spec.beta >= 0.0) || !std::isfinite(spec.beta)) throw InvalidArgument("regularization beta must be >= 0");
  if (spec.features < 1) throw InvalidArgument("feature dimension must be >= 1");
  if (spec.kind == ModelKind::me && spec.classes < 2) throw InvalidArgument("max-entropy needs K >= 2 classes");
  if (spec.kind == ModelKind::lr && spec.classes != 2) throw InvalidArgument("logistic regression is binary (K = 2)");
  if (spec.kind == ModelKind::ppca && (spec.factors < 1 || spec.factors >= spec.features)) {
    throw InvalidArgument("PPCA needs 1 <= q < d (q=" + std::to_string(spec.factors) +
                          ", d=" + std::to_string(spec.features) + ")");
  }
}

std::size_t param_dim(const ModelClassSpec& spec) {
  switch (spec.kind) {
    case ModelKind::lin:
    case ModelKind::lr: return spec.features;
    case ModelKind::me: return spec.features * spec.classes;
    case ModelKind::ppca: return spec.features * spec.factors + 1;
  }
  return 0;
}

std::string layout_description(const ModelClassSpec& spec) {
  const auto d = std::to_string(spec.features);
  switch (spec.kind) {
    case ModelKind::lin:
    case ModelKind::lr: return "vector[" + d + "]";
    case ModelKind::me: return "colmajor[" + d + "x" + std::to_string(spec.classes) + "]";
    case ModelKind::ppca: return "colmajor[" + d + "x" + std::to_string(spec.factors) + "]+noise";
  }
  return "";
}

// ---------------------------------------------------------------------------
// ModelClass base

ModelClass::ModelClass(ModelClassSpec spec) : spec_(spec) {
  validate(spec_);
  dim_ = approxml::param_dim(spec_);
}

void ModelClass::check_theta(const Vector& theta) const {
  if (static_cast<std::size_t>(theta.size()) != dim_) {
    throw InvalidArgument("parameter length " + std::to_string(theta.size()) + " does not match " +
                          to_string(spec_.kind) + " dimension " + std::to_string(dim_));
  }
}

void ModelClass::check_data(const Dataset& data, bool need_labels) const {
  if (data.n_rows() == 0) throw InvalidArgument("dataset is empty");
  if (data.dim() != spec_.features) {
    throw InvalidArgument("dataset dimension " + std::to_string(data.dim()) + " does not match model dimension " +
                          std::to_string(spec_.features));
  }
  if (need_labels && !data.has_labels()) throw InvalidArgument(to_string(spec_.kind) + " requires labels");
}

Matrix ModelClass::grads(const Vector& theta, const Dataset& data) const {
  check_theta(theta);
  check_data(data, supervised());
  ++grads_calls_;
  Matrix q = scores(theta, data);
  if (regularizer_beta() != 0.0) q.rowwise() += regularizer_gradient(theta).transpose();
  return q;
}

Evaluation ModelClass::evaluate(const Vector& theta, const Dataset& data) const {
  check_theta(theta);
  check_data(data, supervised());
  ++evaluate_calls_;
  Evaluation e = mean_loss(theta, data);
  if (!std::isfinite(e.value)) return e;
  const double beta = regularizer_beta();
  if (beta != 0.0) {
    e.value += 0.5 * beta * theta.squaredNorm();
    e.gradient += beta * theta;
  }
  return e;
}

double ModelClass::objective(const Vector& theta, const Dataset& data) const {
  return evaluate(theta, data).value;
}

Vector ModelClass::gradient(const Vector& theta, const Dataset& data) const {
  return evaluate(theta, data).gradient;
}

Vector ModelClass::regularizer_gradient(const Vector& theta) const {
  return regularizer_beta() * theta;
}

Matrix ModelClass::hessian(const Vector&, const Dataset&) const {
  throw UnsupportedOperation("closed-form Hessian is available for lin and lr only, not " + to_string(spec_.kind));
}

Vector ModelClass::predict(const Vector&, const FeatureMatrix&) const {
  throw UnsupportedOperation(to_string(spec_.kind) + " has no pointwise prediction");
}

double ModelClass::diff(const Vector& a, const Vector& b, const Dataset& holdout) const {
  check_theta(a);
  check_theta(b);
  return diff_pairs(a, b, holdout)(0);
}

Matrix ModelClass::project(const Matrix& thetas, const FeatureMatrix& x) const {
  const Index outputs = linear_outputs();
  if (outputs == 0) throw UnsupportedOperation(to_string(spec_.kind) + " predictions are not linear in X");
  if (static_cast<std::size_t>(thetas.rows()) != dim_) throw InvalidArgument("project: wrong parameter dimension");
  if (static_cast<std::size_t>(x.cols()) != spec_.features) throw InvalidArgument("project: wrong feature count");
  // Column c of `thetas` reshaped to d x outputs is a contiguous column-major block.
  const Index d = x.cols();
  return x.times(Matrix(Eigen::Map<const Matrix>(thetas.data(), d, thetas.cols() * outputs)));
}

void ModelClass::check_projection(const Matrix& p0, const Matrix& p1, const Matrix& p2) const {
  const Index outputs = linear_outputs();
  if (outputs == 0) throw UnsupportedOperation(to_string(spec_.kind) + " predictions are not linear in X");
  if (p0.cols() != outputs || p1.rows() != p0.rows() || p2.rows() != p0.rows() || p1.cols() != p2.cols() ||
      p1.cols() % outputs != 0) {
    throw InvalidArgument("diff_projected: inconsistent projection shapes");
  }
}

Vector ModelClass::diff_projected(const Matrix& p0, const Matrix& p1, const Matrix& p2, double s1,
                                  double s2) const {
  check_projection(p0, p1, p2);
  const Index outputs = linear_outputs();
  const Index k = p1.cols() / outputs;
  Vector out(k);
  Matrix a(p0.rows(), outputs);
  Matrix b(p0.rows(), outputs);
  for (Index c = 0; c < k; ++c) {
    a = p0 + s1 * p1.middleCols(c * outputs, outputs);
    b = a + s2 * p2.middleCols(c * outputs, outputs);
    out(c) = diff_outputs(a, b);
  }
  return out;
}

double ModelClass::diff_outputs(const Matrix&, const Matrix&) const {
  throw UnsupportedOperation(to_string(spec_.kind) + " predictions are not linear in X");
}

Vector ModelClass::solve(const Dataset&) const {
  throw UnsupportedOperation("closed-form solve is available for lin and ppca only, not " + to_string(spec_.kind));
}

Vector ModelClass::initial_theta(std::uint64_t) const {
  return Vector::Zero(static_cast<Index>(dim_));
}

namespace {

constexpr Index kDiffBlock = 32;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

void check_pairs(const Matrix& a, const Matrix& b, std::size_t dim) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || static_cast<std::size_t>(a.rows()) != dim) {
    throw InvalidArgument("diff: parameter matrices must both be " + std::to_string(dim) + " x k");
  }
}

// Applies fn(first_col, X*A_block, X*B_block) over column blocks to bound memory.
template <typename Fn>
void for_score_blocks(const FeatureMatrix& x, const Matrix& a, const Matrix& b, Fn&& fn) {
  for (Index c0 = 0; c0 < a.cols(); c0 += kDiffBlock) {
    const Index w = std::min(kDiffBlock, a.cols() - c0);
    Matrix sa = x.times(Matrix(a.middleCols(c0, w)));
    Matrix sb = x.times(Matrix(b.middleCols(c0, w)));
    fn(c0, sa, sb);
  }
}

Index argmax_lowest(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  Index best = 0;
  for (Index k = 1; k < row.size(); ++k) {
    if (row(k) > row(best)) best = k;
  }
  return best;
}

void check_class_labels(const Vector& y, std::size_t classes) {
  for (Index i = 0; i < y.size(); ++i) {
    const double v = y(i);
    if (!(v >= 0) || v != std::floor(v) || v >= static_cast<double>(classes)) {
      throw InvalidArgument("label " + std::to_string(v) + " at row " + std::to_string(i) +
                            " is not a class index in [0, " + std::to_string(classes) + ")");
    }
  }
}

// ---------------------------------------------------------------------------

class LinearRegression final : public ModelClass {
 public:
  using ModelClass::ModelClass;

  Matrix hessian(const Vector& theta, const Dataset& data) const override {
    check_theta(theta);
    check_data(data, false);
    const double n = static_cast<double>(data.n_rows());
    Matrix h = data.features().weighted_gram(Vector::Ones(static_cast<Index>(data.n_rows()))) / n;
    h.diagonal().array() += spec().beta;
    return h;
  }

  Vector predict(const Vector& theta, const FeatureMatrix& x) const override {
    check_theta(theta);
    return x.times(theta);
  }

  Index linear_outputs() const override { return 1; }

  double diff_outputs(const Matrix& a, const Matrix& b) const override {
    return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.rows()));
  }

  // b_c - a_c = s2 * p2_c, so p0 and p1 drop out.
  Vector diff_projected(const Matrix& p0, const Matrix& p1, const Matrix& p2, double, double s2) const override {
    check_projection(p0, p1, p2);
    const double n = static_cast<double>(p0.rows());
    return (std::abs(s2) * (p2.colwise().squaredNorm().array() / n).sqrt()).transpose();
  }

  Vector diff_pairs(const Matrix& a, const Matrix& b, const Dataset& holdout) const override {
    check_pairs(a, b, param_dim());
    check_data(holdout, false);
    const double n = static_cast<double>(holdout.n_rows());
    Matrix delta = a - b;
    Vector out(a.cols());
    for (Index c0 = 0; c0 < a.cols(); c0 += kDiffBlock) {
      const Index w = std::min(kDiffBlock, a.cols() - c0);
      Matrix s = holdout.features().times(Matrix(delta.middleCols(c0, w)));
      out.segment(c0, w) = (s.colwise().squaredNorm().array() / n).sqrt().transpose();
    }
    return out;
  }

  Vector solve(const Dataset& data) const override {
    check_data(data, true);
    const double n = static_cast<double>(data.n_rows());
    Matrix a = data.features().weighted_gram(Vector::Ones(static_cast<Index>(data.n_rows()))) / n;
    a.diagonal().array() += spec().beta;
    Vector rhs = data.features().transpose_times(data.labels()) / n;
    if (spec().beta == 0.0) {
      Eigen::ColPivHouseholderQR<Matrix> qr(a);
      if (qr.rank() < a.rows()) {
        throw NumericalError("least-squares system is rank deficient with beta = 0; use beta > 0");
      }
    }
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) throw NumericalError("least-squares normal matrix is not positive definite");
    return llt.solve(rhs);
  }

 protected:
  Matrix scores(const Vector& theta, const Dataset& data) const override {
    const auto& x = data.features();
    Vector resid = x.times(theta) - data.labels();
    Matrix q = x.to_dense();
    q.array().colwise() *= resid.array();
    return q;
  }

  Evaluation mean_loss(const Vector& theta, const Dataset& data) const override {
    const auto& x = data.features();
    const double n = static_cast<double>(data.n_rows());
    Vector resid = x.times(theta) - data.labels();
    return {0.5 * resid.squaredNorm() / n, x.transpose_times(resid) / n};
  }
};

// ---------------------------------------------------------------------------

class LogisticRegression final : public ModelClass {
 public:
  using ModelClass::ModelClass;
  bool classification() const override { return true; }

  Matrix hessian(const Vector& theta, const Dataset& data) const override {
    check_theta(theta);
    check_data(data, false);
    const double n = static_cast<double>(data.n_rows());
    Vector z = data.features().times(theta);
    Vector w = z.unaryExpr([](double v) {
      const double s = sigmoid(v);
      return s * (1.0 - s);
    });
    Matrix h = data.features().weighted_gram(w) / n;
    h.diagonal().array() += spec().beta;
    return h;
  }

  Vector predict(const Vector& theta, const FeatureMatrix& x) const override {
    check_theta(theta);
    // sigma(z) >= 0.5 exactly when z >= 0.
    return x.times(theta).unaryExpr([](double z) { return z >= 0.0 ? 1.0 : 0.0; });
  }

  Index linear_outputs() const override { return 1; }

  double diff_outputs(const Matrix& a, const Matrix& b) const override {
    Index differ = 0;
    for (Index i = 0; i < a.rows(); ++i) differ += (a(i, 0) >= 0.0) != (b(i, 0) >= 0.0);
    return static_cast<double>(differ) / static_cast<double>(a.rows());
  }

  Vector diff_projected(const Matrix& p0, const Matrix& p1, const Matrix& p2, double s1, double s2) const override {
    check_projection(p0, p1, p2);
    const Index rows = p0.rows();
    Vector out(p1.cols());
    for (Index c = 0; c < p1.cols(); ++c) {
      const double* z0 = p0.data();
      const double* z1 = p1.col(c).data();
      const double* z2 = p2.col(c).data();
      // Written branch-free so the loop vectorizes: (a >= 0) != (b >= 0)
      // exactly when min(a, b) < 0 <= max(a, b).
      double differ = 0.0;
      for (Index i = 0; i < rows; ++i) {
        const double a = z0[i] + s1 * z1[i];
        const double b = a + s2 * z2[i];
        const double lo = a < b ? a : b;
        const double hi = a < b ? b : a;
        differ += (lo < 0.0 && hi >= 0.0) ? 1.0 : 0.0;
      }
      out(c) = differ / static_cast<double>(rows);
    }
    return out;
  }

  Vector diff_pairs(const Matrix& a, const Matrix& b, const Dataset& holdout) const override {
    check_pairs(a, b, param_dim());
    check_data(holdout, false);
    const double n = static_cast<double>(holdout.n_rows());
    Vector out(a.cols());
    for_score_blocks(holdout.features(), a, b, [&](Index c0, const Matrix& sa, const Matrix& sb) {
      for (Index c = 0; c < sa.cols(); ++c) {
        Index differ = 0;
        for (Index i = 0; i < sa.rows(); ++i) differ += (sa(i, c) >= 0.0) != (sb(i, c) >= 0.0);
        out(c0 + c) = static_cast<double>(differ) / n;
      }
    });
    return out;
  }

 protected:
  Matrix scores(const Vector& theta, const Dataset& data) const override {
    const auto& x = data.features();
    const Vector& t = data.labels();
    check_class_labels(t, 2);
    Vector z = x.times(theta);
    Vector r(z.size());
    for (Index i = 0; i < z.size(); ++i) r(i) = sigmoid(z(i)) - t(i);
    Matrix q = x.to_dense();
    q.array().colwise() *= r.array();
    return q;
  }

  Evaluation mean_loss(const Vector& theta, const Dataset& data) const override {
    const auto& x = data.features();
    const Vector& t = data.labels();
    check_class_labels(t, 2);
    const double n = static_cast<double>(data.n_rows());
    Vector z = x.times(theta);
    Vector r(z.size());
    double loss = 0.0;
    for (Index i = 0; i < z.size(); ++i) {
      loss += softplus(z(i)) - t(i) * z(i);
      r(i) = sigmoid(z(i)) - t(i);
    }
    return {loss / n, x.transpose_times(r) / n};
  }
};

// ---------------------------------------------------------------------------

class MaxEntropy final : public ModelClass {
 public:
  using ModelClass::ModelClass;
  bool classification() const override { return true; }

  Vector predict(const Vector& theta, const FeatureMatrix& x) const override {
    check_theta(theta);
    Matrix z = x.times(weights(theta));
    Vector out(z.rows());
    for (Index i = 0; i < z.rows(); ++i) out(i) = static_cast<double>(argmax_lowest(z.row(i)));
    return out;
  }

  Index linear_outputs() const override { return static_cast<Index>(spec().classes); }

  double diff_outputs(const Matrix& a, const Matrix& b) const override {
    Index differ = 0;
    for (Index i = 0; i < a.rows(); ++i) differ += argmax_lowest(a.row(i)) != argmax_lowest(b.row(i));
    return static_cast<double>(differ) / static_cast<double>(a.rows());
  }

  Vector diff_pairs(const Matrix& a, const Matrix& b, const Dataset& holdout) const override {
    check_pairs(a, b, param_dim());
    check_data(holdout, false);
    const auto& x = holdout.features();
    const double n = static_cast<double>(holdout.n_rows());
    Vector out(a.cols());
    for (Index c = 0; c < a.cols(); ++c) {
      Matrix za = x.times(weights(a.col(c)));
      Matrix zb = x.times(weights(b.col(c)));
      Index differ = 0;
      for (Index i = 0; i < za.rows(); ++i) differ += argmax_lowest(za.row(i)) != argmax_lowest(zb.row(i));
      out(c) = static_cast<double>(differ) / n;
    }
    return out;
  }

 protected:
  Matrix scores(const Vector& theta, const Dataset& data) const override {
    const auto d = static_cast<Index>(spec().features);
    const auto k = static_cast<Index>(spec().classes);
    Matrix resid = residuals(theta, data, nullptr);
    auto x = data.features().to_dense();
    Matrix q(x.rows(), d * k);
    for (Index c = 0; c < k; ++c) {
      q.middleCols(c * d, d) = x;
      q.middleCols(c * d, d).array().colwise() *= resid.col(c).array();
    }
    return q;
  }

  Evaluation mean_loss(const Vector& theta, const Dataset& data) const override {
    double loss = 0.0;
    Matrix resid = residuals(theta, data, &loss);
    const double n = static_cast<double>(data.n_rows());
    Matrix g = data.features().transpose_times(resid) / n;
    return {loss / n, Eigen::Map<const Vector>(g.data(), g.size())};
  }

 private:
  Matrix weights(const Eigen::Ref<const Vector>& theta) const {
    return Eigen::Map<const Matrix>(theta.data(), static_cast<Index>(spec().features),
                                    static_cast<Index>(spec().classes));
  }

  // softmax(Theta^T x_i) - onehot(t_i), one row per example; accumulates the
  // summed negative log-likelihood into *loss when requested.
  Matrix residuals(const Vector& theta, const Dataset& data, double* loss) const {
    const Vector& t = data.labels();
    check_class_labels(t, spec().classes);
    Matrix z = data.features().times(weights(theta));
    double total = 0.0;
    for (Index i = 0; i < z.rows(); ++i) {
      const double m = z.row(i).maxCoeff();
      auto e = (z.row(i).array() - m).exp();
      const double s = e.sum();
      const auto label = static_cast<Index>(t(i));
      total += m + std::log(s) - z(i, label);
      z.row(i) = e / s;
      z(i, label) -= 1.0;
    }
    if (loss) *loss = total;
    return z;
  }
};

// ---------------------------------------------------------------------------

class Ppca final : public ModelClass {
 public:
  using ModelClass::ModelClass;
  bool supervised() const override { return false; }
  double regularizer_beta() const override { return 0.0; }

  bool feasible(const Vector& theta) const override {
    return theta.allFinite() && theta(theta.size() - 1) > 0.0;
  }

  Vector initial_theta(std::uint64_t seed) const override {
    Rng rng(seed);
    std::normal_distribution<double> factor(0.0, 0.1);
    Vector theta(static_cast<Index>(param_dim()));
    for (Index i = 0; i + 1 < theta.size(); ++i) theta(i) = factor(rng);
    theta(theta.size() - 1) = 1.0;
    return theta;
  }

  Vector diff_pairs(const Matrix& a, const Matrix& b, const Dataset&) const override {
    check_pairs(a, b, param_dim());
    const Index m = a.rows() - 1;
    Vector out(a.cols());
    for (Index c = 0; c < a.cols(); ++c) {
      auto fa = a.col(c).head(m);
      auto fb = b.col(c).head(m);
      const double na = fa.norm();
      const double nb = fb.norm();
      if (na == 0.0 || nb == 0.0) {
        out(c) = (fa - fb).norm() == 0.0 ? 0.0 : 1.0;
      } else {
        out(c) = std::max(0.0, 1.0 - fa.dot(fb) / (na * nb));
      }
    }
    return out;
  }

  Vector solve(const Dataset& data) const override {
    check_data(data, false);
    const auto d = static_cast<Index>(spec().features);
    const auto q = static_cast<Index>(spec().factors);
    const double n = static_cast<double>(data.n_rows());
    Matrix s = data.features().weighted_gram(Vector::Ones(static_cast<Index>(data.n_rows()))) / n;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition of the sample covariance failed");
    const Vector& lambda = eig.eigenvalues();  // ascending
    const double noise = lambda.head(d - q).mean();
    if (!(noise > 0.0)) throw NumericalError("PPCA noise estimate is not positive; data rank <= q");
    Vector theta(static_cast<Index>(param_dim()));
    Eigen::Map<Matrix> factors(theta.data(), d, q);
    for (Index l = 0; l < q; ++l) {
      const Index src = d - 1 - l;
      factors.col(l) = eig.eigenvectors().col(src) * std::sqrt(std::max(lambda(src) - noise, 0.0));
    }
    theta(theta.size() - 1) = noise;
    return theta;
  }

 protected:
  Matrix scores(const Vector& theta, const Dataset& data) const override {
    if (!feasible(theta)) throw NumericalError("PPCA noise variance must be positive and finite");
    const auto d = static_cast<Index>(spec().features);
    const auto q = static_cast<Index>(spec().factors);
    Factorized f = factorize(theta);
    auto x = data.features().to_dense();
    Matrix xc = x * f.c_inv;          // rows are (C^-1 x_i)^T
    Matrix xw = xc * f.factors;       // rows are x_i^T C^-1 Theta
    const double tr = f.c_inv.trace();
    Matrix out(x.rows(), d * q + 1);
    Eigen::Map<const Vector> base(f.c_inv_factors.data(), d * q);
    for (Index i = 0; i < x.rows(); ++i) {
      auto row = out.row(i);
      row.head(d * q) = base.transpose();
      for (Index l = 0; l < q; ++l) row.segment(l * d, d) -= xw(i, l) * xc.row(i);
      row(d * q) = 0.5 * (tr - xc.row(i).squaredNorm());
    }
    return out;
  }

  Evaluation mean_loss(const Vector& theta, const Dataset& data) const override {
    if (!feasible(theta)) return {std::numeric_limits<double>::infinity(), Vector()};
    const auto d = static_cast<Index>(spec().features);
    const auto q = static_cast<Index>(spec().factors);
    const double n = static_cast<double>(data.n_rows());
    Factorized f = factorize(theta);
    const auto& x = data.features();
    Matrix xc = x.times(f.c_inv);
    // sum_i x_i^T C^-1 x_i
    double quad = 0.0;
    if (const auto* dense = x.dense()) {
      quad = (dense->array() * xc.array()).sum();
    } else {
      quad = x.sparse()->cwiseProduct(xc).sum();
    }
    Evaluation e;
    e.value = 0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + f.log_det + quad / n);
    // S C^-1 Theta = X^T X C^-1 Theta / n
    Matrix s_w = x.transpose_times(Matrix(x.times(f.c_inv_factors))) / n;
    Matrix g_factors = f.c_inv_factors - f.c_inv * s_w;
    e.gradient.resize(d * q + 1);
    e.gradient.head(d * q) = Eigen::Map<const Vector>(g_factors.data(), d * q);
    e.gradient(d * q) = 0.5 * (f.c_inv.trace() - xc.squaredNorm() / n);
    return e;
  }

 private:
  struct Factorized {
    Matrix factors;
    Matrix c_inv;
    Matrix c_inv_factors;
    double log_det = 0.0;
  };

  Factorized factorize(const Vector& theta) const {
    const auto d = static_cast<Index>(spec().features);
    const auto q = static_cast<Index>(spec().factors);
    Factorized f;
    f.factors = Eigen::Map<const Matrix>(theta.data(), d, q);
    Matrix c = f.factors * f.factors.transpose();
    c.diagonal().array() += theta(theta.size() - 1);
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() != Eigen::Success) {
      log_warning("PPCA covariance not positive definite; adding 1e-12 I");
      c.diagonal().array() += 1e-12;
      llt.compute(c);
      if (llt.info() != Eigen::Success) throw NumericalError("PPCA covariance C is numerically singular");
    }
    f.log_det = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
    f.c_inv = llt.solve(Matrix::Identity(d, d));
    f.c_inv = 0.5 * (f.c_inv + f.c_inv.transpose()).eval();
    f.c_inv_factors = f.c_inv * f.factors;
    return f;
  }
};

}  // namespace

std::unique_ptr<ModelClass> make_model_class(const ModelClassSpec& spec) {
  switch (spec.kind) {
    case ModelKind::lin: return std::make_unique<LinearRegression>(spec);
    case ModelKind::lr: return std::make_unique<LogisticRegression>(spec);
    case ModelKind::me: return std::make_unique<MaxEntropy>(spec);
    case ModelKind::ppca: return std::make_unique<Ppca>(spec);
  }
  throw InvalidArgument("unknown model class");
}

}  // namespace approxml
