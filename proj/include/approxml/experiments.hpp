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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "approxml/coordinator.hpp"

namespace approxml {

/// Worker count for fan-out experiments: APPROXML_THREADS when set, else the
/// hardware concurrency.
std::size_t default_thread_count();

struct FullModel {
  TrainedModel model;
  double seconds = 0.0;
};

/// Trains on every training row with the same optimizer configuration.
FullModel train_full_model(const DataSplit& data, const ModelClassSpec& spec, const OptimizerConfig& config);

struct CoverageOptions {
  ModelClassSpec spec;
  Contract contract;
  RunConfig config;
  std::size_t runs = 40;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: default_thread_count()
};

struct CoverageRun {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double requested_eps = 0.0;
  double delivered_eps = 0.0;
  /// Difference between the delivered model and the trained full model.
  double actual_v = 0.0;
  std::size_t n_used = 0;
  std::size_t trainings = 0;
  std::size_t optimizer_calls = 0;
  bool within = false;
  RunStatus status = RunStatus::contract_met;
  bool converged = true;
  std::optional<double> approx_error;
  std::optional<double> error_bound;
  std::optional<double> full_error;
  std::optional<bool> bound_holds;
  double seconds = 0.0;
  /// Raw probe estimates of the size search, in probe order.
  std::vector<Probe> probes;
};

struct CoverageSummary {
  std::vector<CoverageRun> runs;
  double pass_rate = 0.0;
  std::optional<double> bound_rate;
  double v_median = 0.0;
  double v_p95 = 0.0;
  double v_max = 0.0;
  FullModel full;
};

/// Repeats the contract workflow `runs` times with independent seeds and
/// compares each delivered model against the trained full model.
CoverageSummary run_coverage(const DataSplit& data, const CoverageOptions& options,
                             const std::optional<FullModel>& full = std::nullopt);

void write_coverage_csv(std::ostream& out, const CoverageSummary& summary);

struct BenchOptions {
  ModelClassSpec spec;
  std::vector<double> accuracies = {0.9, 0.95, 0.99};
  double delta = 0.05;
  std::size_t n0 = 10000;
  RunConfig config;
  std::size_t reps = 1;
  std::uint64_t seed = 1;
  std::size_t max_full_rows = 2000000;
};

struct BenchRow {
  std::string strategy;
  double requested_accuracy = 0.0;
  std::size_t rep = 0;
  double achieved_v = 0.0;
  std::size_t sample_size = 0;
  double seconds = 0.0;
  std::size_t trainings = 0;
  bool met = false;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  FullModel full;
};

/// Contract workflow versus FixedRatio, RelativeRatio, and IncEstimator, all
/// judged against the trained full model.
BenchResult run_bench(const DataSplit& data, const BenchOptions& options);

void write_bench_csv(std::ostream& out, const BenchResult& result);

}  // namespace approxml
