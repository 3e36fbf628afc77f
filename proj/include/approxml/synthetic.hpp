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

#include "approxml/data.hpp"
#include "approxml/mcs.hpp"

namespace approxml {

/// Generator for well-specified synthetic problems.
///
///   lin : y = theta*^T x + N(0, noise^2)
///   lr  : y ~ Bernoulli(sigmoid(theta*^T x))
///   me  : y ~ Categorical(softmax(Theta*^T x))
///   ppca: x = W z + N(0, noise^2 I), z ~ N(0, I_q)
///
/// Features are i.i.d. standard normal; |theta*| (or each column of W) has
/// norm `signal`.
struct SyntheticSpec {
  ModelKind kind = ModelKind::lr;
  std::size_t rows = 10000;
  std::size_t dim = 10;
  std::size_t classes = 3;
  std::size_t factors = 1;
  double signal = 2.0;
  double noise = 1.0;
  std::uint64_t seed = 1;
};

struct SyntheticData {
  Dataset data;
  /// Generating parameter in the model's layout (PPCA: W, without noise).
  Vector truth;
};

SyntheticData make_synthetic(const SyntheticSpec& spec);

}  // namespace approxml
