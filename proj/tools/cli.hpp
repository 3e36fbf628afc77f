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
#include "approxml/experiments.hpp"
#include "approxml/synthetic.hpp"

namespace approxml::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitNotMet = 2;
inline constexpr int kExitUsage = 64;

enum class Command { train, accuracy, size, bench, coverage };

/// Flag values after parsing; validated by `validate` before any data is read.
struct CliConfig {
  Command command = Command::train;

  std::optional<std::string> data_path;
  std::string format = "csv";
  std::optional<std::string> label;
  /// Synthetic generator, used when no --data is given.
  SyntheticSpec synthetic;

  ModelClassSpec model;
  Contract contract;
  RunConfig run;
  std::optional<std::size_t> n;
  double holdout_frac = 0.2;
  std::uint64_t seed = 1;
  std::optional<std::string> out;

  std::size_t runs = 40;
  std::size_t threads = 0;
  std::vector<double> accuracies = {0.9, 0.95, 0.99};
  std::size_t reps = 1;
  std::size_t max_full_rows = 2000000;
};

struct UsageError : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

/// Parses argv (without the program name). Throws UsageError on bad flags.
/// Returns nullopt when help was printed to `out`.
std::optional<CliConfig> parse_args(const std::vector<std::string>& args, std::ostream& out);

void validate(const CliConfig& config);

/// Loads or generates the dataset, encodes classes, and splits off the holdout.
/// Fills in the model's feature and class counts.
DataSplit prepare_data(CliConfig& config);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace approxml::cli
