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

#include "approxml/synthetic.hpp"

#include <cmath>

namespace approxml {

namespace {

Vector random_direction(Index size, double norm, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(size);
  for (Index i = 0; i < size; ++i) v(i) = normal(rng);
  return v * (norm / v.norm());
}

}  // namespace

SyntheticData make_synthetic(const SyntheticSpec& spec) {
  if (spec.rows < 1 || spec.dim < 1) throw InvalidArgument("synthetic data needs rows >= 1 and dim >= 1");
  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const auto n = static_cast<Index>(spec.rows);
  const auto d = static_cast<Index>(spec.dim);

  SyntheticData out;
  FeatureMatrix::Dense x(n, d);
  std::optional<Vector> y;

  switch (spec.kind) {
    case ModelKind::lin:
    case ModelKind::lr: {
      out.truth = random_direction(d, spec.signal, rng);
      y = Vector(n);
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) x(i, j) = normal(rng);
        const double z = x.row(i).dot(out.truth);
        if (spec.kind == ModelKind::lin) {
          (*y)(i) = z + spec.noise * normal(rng);
        } else {
          (*y)(i) = uniform(rng) < 1.0 / (1.0 + std::exp(-z)) ? 1.0 : 0.0;
        }
      }
      break;
    }
    case ModelKind::me: {
      if (spec.classes < 2) throw InvalidArgument("synthetic max-entropy data needs >= 2 classes");
      const auto k = static_cast<Index>(spec.classes);
      out.truth = random_direction(d * k, spec.signal, rng);
      Eigen::Map<const Matrix> w(out.truth.data(), d, k);
      y = Vector(n);
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) x(i, j) = normal(rng);
        Eigen::RowVectorXd z = x.row(i) * w;
        Eigen::ArrayXd p = (z.array() - z.maxCoeff()).exp().transpose();
        p /= p.sum();
        double u = uniform(rng);
        Index label = k - 1;
        for (Index c = 0; c < k; ++c) {
          if (u < p(c)) {
            label = c;
            break;
          }
          u -= p(c);
        }
        (*y)(i) = static_cast<double>(label);
      }
      break;
    }
    case ModelKind::ppca: {
      const auto q = static_cast<Index>(spec.factors);
      if (q < 1 || q >= d) throw InvalidArgument("synthetic PPCA data needs 1 <= factors < dim");
      Matrix w(d, q);
      for (Index l = 0; l < q; ++l) w.col(l) = random_direction(d, spec.signal, rng);
      out.truth = Eigen::Map<const Vector>(w.data(), d * q);
      Vector z(q);
      for (Index i = 0; i < n; ++i) {
        for (Index l = 0; l < q; ++l) z(l) = normal(rng);
        x.row(i) = (w * z).transpose();
        for (Index j = 0; j < d; ++j) x(i, j) += spec.noise * normal(rng);
      }
      break;
    }
  }
  out.data = Dataset(FeatureMatrix(std::move(x)), std::move(y));
  return out;
}

}  // namespace approxml
