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

#include <optional>
#include <string>
#include <vector>

#include "approxml/mcs.hpp"

namespace approxml {

enum class OptimizerMethod { automatic, bfgs, lbfgs };

OptimizerMethod parse_optimizer_method(const std::string& name);

struct OptimizerConfig {
  OptimizerMethod method = OptimizerMethod::automatic;
  std::size_t lbfgs_memory = 10;
  double grad_tol = 1e-6;
  std::size_t max_iters = 500;
  /// `automatic` picks BFGS below this parameter dimension, L-BFGS otherwise.
  std::size_t dim_switch = 100;
  /// Seed for random initial points (PPCA).
  std::uint64_t init_seed = 0x1d2c3b4a5968ULL;
};

void validate(const OptimizerConfig& config);

enum class OptimizeStatus { converged, max_iterations, line_search_failed };

std::string to_string(OptimizeStatus status);

struct OptimizeResult {
  Vector theta;
  double objective = 0.0;
  double grad_norm = 0.0;  // infinity norm of the mean gradient
  std::size_t iterations = 0;
  OptimizeStatus status = OptimizeStatus::converged;
  OptimizerMethod method = OptimizerMethod::bfgs;
  /// Objective after every accepted step, starting with the initial point.
  std::vector<double> trace;

  bool converged() const { return status == OptimizeStatus::converged; }
};

/// Minimizes f_n over `data` with BFGS or L-BFGS and a backtracking Armijo
/// line search (c = 1e-4, halving, step floor 1e-12). Throws NumericalError
/// when the objective or gradient is non-finite at the initial point.
OptimizeResult minimize(const ModelClass& model, const Dataset& data, const OptimizerConfig& config,
                        const std::optional<Vector>& init = std::nullopt);

/// Runs `minimize` and packages the result with its provenance.
TrainedModel train(const ModelClass& model, const Dataset& data, std::size_t population,
                   const OptimizerConfig& config, const std::optional<Vector>& init = std::nullopt);

/// Number of `minimize` calls made on the current thread.
std::size_t optimizer_invocations();

}  // namespace approxml
