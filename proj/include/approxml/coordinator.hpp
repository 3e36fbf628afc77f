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

#include "approxml/optimizer.hpp"
#include "approxml/sizer.hpp"

namespace approxml {

/// Requested error bound eps with confidence 1 - delta.
struct Contract {
  double eps = 0.05;
  double delta = 0.05;
  std::size_t n0 = 10000;
};

void validate(const Contract& contract);

struct RunConfig {
  OptimizerConfig optimizer;
  StatsMethod stats_method = StatsMethod::observed_fisher;
  /// Draws for accuracy estimation and for each size probe.
  std::size_t k = 100;
  std::size_t size_k = 100;
  double j_diag_eps = 0.0;
  double inverse_gradients_eps = 1e-6;
  /// Holdout rows used to evaluate model differences; 0 means all.
  std::size_t eval_rows = 20000;
};

void validate(const RunConfig& config);

/// Child seeds of a run, all derived from `master`.
struct Seeds {
  std::uint64_t master = 0;
  std::uint64_t sample = 0;
  std::uint64_t sampler = 0;
  std::uint64_t eval_rows = 0;

  static Seeds from_master(std::uint64_t master);
};

/// Disjoint draw streams inside the sampler seed.
inline constexpr std::uint64_t kAccuracyStream = 1;
inline constexpr std::uint64_t kSizeStream = 2;

struct PhaseTimings {
  double initial_training = 0.0;
  double statistics = 0.0;
  double accuracy = 0.0;
  double size_search = 0.0;
  double final_training = 0.0;
  double final_statistics = 0.0;
  double final_accuracy = 0.0;
  double total = 0.0;
};

struct ModelOutcome {
  TrainedModel model;
  AccuracyReport accuracy;
};

enum class RunStatus { contract_met, saturated, not_certified, accuracy_only, size_only };

std::string to_string(RunStatus status);

struct RunReport {
  ModelClassSpec spec;
  Contract contract;
  RunConfig config;
  Seeds seeds;
  ModelOutcome initial;
  std::optional<ModelOutcome> final_model;
  std::optional<SizeEstimate> size_estimate;
  std::size_t trainings_performed = 0;
  PhaseTimings timings;
  RunStatus status = RunStatus::contract_met;
  /// Classification only: holdout error of the returned model and the bound
  /// it implies for the full model's holdout error.
  std::optional<double> approx_holdout_error;
  std::optional<double> full_error_bound;

  const ModelOutcome& delivered() const { return final_model ? *final_model : initial; }
  bool converged() const;
};

/// Trains m0 on an n0-row sample, certifies it, and when its bound exceeds
/// the contract estimates the needed size and trains once more on a sample
/// that extends the first one.
RunReport train_with_contract(const DataSplit& data, const ModelClassSpec& spec, const Contract& contract,
                              const RunConfig& config, std::uint64_t seed);

/// One training on a size-n sample plus its accuracy report.
RunReport estimate_accuracy_only(const DataSplit& data, const ModelClassSpec& spec, std::size_t n, double delta,
                                 const RunConfig& config, std::uint64_t seed);

/// Initial training and size estimation without the second training.
RunReport estimate_size_only(const DataSplit& data, const ModelClassSpec& spec, const Contract& contract,
                             const RunConfig& config, std::uint64_t seed);

/// eps_g + eps - eps_g * eps.
double generalization_bound(double eps_g, double eps);

/// Rows of the holdout used for difference evaluation under `eval_rows`.
Dataset evaluation_rows(const Dataset& holdout, std::size_t eval_rows, std::uint64_t seed);

/// Misclassification rate of a classifier on labeled rows.
double classification_error(const ModelClass& model, const Vector& theta, const Dataset& data);

}  // namespace approxml
