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

#include <json.hpp>

#include "approxml/coordinator.hpp"

namespace approxml {

using json = nlohmann::json;

json to_json(const ModelClassSpec& spec);
/// {class, beta, K|q, theta[], n, N, layout} plus convergence details.
json to_json(const TrainedModel& model);
TrainedModel trained_model_from_json(const json& j);

/// Flat arrays: U in column-major order with its shape, s, beta, n.
json to_json(const StatFactors& factors);
StatFactors stat_factors_from_json(const json& j);

json to_json(const AccuracyReport& report);
json to_json(const SizeEstimate& estimate);
json to_json(const RunReport& report);

}  // namespace approxml
