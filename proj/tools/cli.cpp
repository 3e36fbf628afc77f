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

#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "approxml/report.hpp"

namespace approxml::cli {

namespace {

constexpr std::uint64_t kSplitStream = 11;

std::string command_name(Command c) {
  switch (c) {
    case Command::train: return "train";
    case Command::accuracy: return "accuracy";
    case Command::size: return "size";
    case Command::bench: return "bench";
    case Command::coverage: return "coverage";
  }
  return "train";
}

struct Raw {
  std::string model;
  std::string stats_method = "observed-fisher";
  std::string optimizer = "auto";
  double accuracy = 0.95;
  double confidence = 0.95;
  std::optional<std::uint64_t> data_seed;
  std::optional<std::size_t> classes;
};

void add_data_options(CLI::App& app, CliConfig& c, Raw& raw) {
  app.add_option("--data", c.data_path, "Input file; omit to generate synthetic data");
  app.add_option("--format", c.format, "csv or sparse-svm")->capture_default_str();
  app.add_option("--label", c.label, "Label column name (or 0-based index) for CSV input");
  app.add_option("--holdout-frac", c.holdout_frac, "Fraction of rows held out")->capture_default_str();
  app.add_option("--rows", c.synthetic.rows, "Synthetic rows")->capture_default_str();
  app.add_option("--dim", c.synthetic.dim, "Synthetic feature count")->capture_default_str();
  app.add_option("--classes", raw.classes, "Synthetic class count (me)");
  app.add_option("--signal", c.synthetic.signal, "Norm of the generating parameter")->capture_default_str();
  app.add_option("--noise", c.synthetic.noise, "Synthetic noise scale")->capture_default_str();
  app.add_option("--data-seed", raw.data_seed, "Seed of the synthetic generator");
}

void add_model_options(CLI::App& app, CliConfig& c, Raw& raw) {
  app.add_option("--model", raw.model, "lin, lr, me, or ppca")->required();
  app.add_option("--beta", c.model.beta, "L2 regularization coefficient")->capture_default_str();
  app.add_option("--q", c.model.factors, "PPCA factor count")->capture_default_str();
  app.add_option("--stats-method", raw.stats_method, "closed-form, inverse-gradients, or observed-fisher")
      ->capture_default_str();
  app.add_option("--k", c.run.k, "Monte Carlo draws")->capture_default_str();
  app.add_option("--size-k", c.run.size_k, "Monte Carlo draws per size probe")->capture_default_str();
  app.add_option("--j-diag-eps", c.run.j_diag_eps, "Ridge added to J")->capture_default_str();
  app.add_option("--eval-rows", c.run.eval_rows, "Holdout rows for model differences (0: all)")
      ->capture_default_str();
  app.add_option("--optimizer", raw.optimizer, "auto, bfgs, or lbfgs")->capture_default_str();
  app.add_option("--grad-tol", c.run.optimizer.grad_tol, "Gradient norm tolerance")->capture_default_str();
  app.add_option("--max-iters", c.run.optimizer.max_iters, "Optimizer iteration limit")->capture_default_str();
  app.add_option("--seed", c.seed, "Master seed")->capture_default_str();
  app.add_option("--out", c.out, "Output path");
}

void add_contract_options(CLI::App& app, CliConfig& c, Raw& raw) {
  app.add_option("--accuracy", raw.accuracy, "Requested accuracy 1 - eps")->capture_default_str();
  app.add_option("--confidence", raw.confidence, "Requested confidence 1 - delta")->capture_default_str();
  app.add_option("--n0", c.contract.n0, "Initial sample size")->capture_default_str();
}

std::string format_seconds(double s) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << s << "s";
  return os.str();
}

// Writes to --out when given; otherwise to `fallback`.
void emit(const CliConfig& c, std::ostream& fallback, const std::string& text) {
  if (!c.out) {
    fallback << text;
    return;
  }
  std::ofstream f(*c.out);
  if (!f) throw std::runtime_error("cannot open output file " + *c.out);
  f << text;
  if (!f) throw std::runtime_error("failed writing " + *c.out);
}

json data_json(const CliConfig& c, const DataSplit& data) {
  json j = {{"holdout_frac", c.holdout_frac}, {"split_seed", data.seed},
            {"train_rows", data.train.n_rows()}, {"holdout_rows", data.holdout.n_rows()}};
  if (c.data_path) {
    j["path"] = *c.data_path;
    j["format"] = c.format;
    j["label"] = c.label ? json(*c.label) : json(nullptr);
  } else {
    j["synthetic"] = {{"rows", c.synthetic.rows},     {"dim", c.synthetic.dim},
                      {"classes", c.synthetic.classes}, {"factors", c.synthetic.factors},
                      {"signal", c.synthetic.signal}, {"noise", c.synthetic.noise},
                      {"seed", c.synthetic.seed}};
  }
  return j;
}

int exit_code(const RunReport& r) {
  switch (r.status) {
    case RunStatus::contract_met:
    case RunStatus::accuracy_only:
    case RunStatus::size_only: return kExitOk;
    case RunStatus::saturated:
    case RunStatus::not_certified: return kExitNotMet;
  }
  return kExitRuntime;
}

}  // namespace

std::optional<CliConfig> parse_args(const std::vector<std::string>& args, std::ostream& out) {
  CliConfig c;
  Raw raw;
  CLI::App app{"Approximate maximum-likelihood training with an accuracy contract", "approxml"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "Train a model that meets the requested accuracy");
  auto* accuracy = app.add_subcommand("accuracy", "Train on n rows and bound its difference to the full model");
  auto* size = app.add_subcommand("size", "Estimate the sample size needed for the requested accuracy");
  auto* bench = app.add_subcommand("bench", "Compare against sample-size baselines using the full model");
  auto* coverage = app.add_subcommand("coverage", "Measure how often the delivered guarantee holds");

  for (auto* sub : {train, accuracy, size, bench, coverage}) {
    add_data_options(*sub, c, raw);
    add_model_options(*sub, c, raw);
  }
  for (auto* sub : {train, accuracy, size, coverage}) add_contract_options(*sub, c, raw);
  accuracy->add_option("--n", c.n, "Sample size to train on")->required();
  coverage->add_option("--runs", c.runs, "Independent runs (>= 20)")->capture_default_str();
  coverage->add_option("--threads", c.threads, "Worker threads (0: APPROXML_THREADS or all cores)");
  bench->add_option("--accuracies", c.accuracies, "Requested accuracies")->delimiter(',');
  bench->add_option("--confidence", raw.confidence, "Requested confidence 1 - delta")->capture_default_str();
  bench->add_option("--n0", c.contract.n0, "Initial sample size")->capture_default_str();
  bench->add_option("--reps", c.reps, "Repetitions per accuracy")->capture_default_str();
  bench->add_option("--max-full-rows", c.max_full_rows, "Largest training set for full-model ground truth")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (train->parsed()) c.command = Command::train;
  if (accuracy->parsed()) c.command = Command::accuracy;
  if (size->parsed()) c.command = Command::size;
  if (bench->parsed()) c.command = Command::bench;
  if (coverage->parsed()) c.command = Command::coverage;

  try {
    c.model.kind = parse_model_kind(raw.model);
    c.run.stats_method = parse_stats_method(raw.stats_method);
    c.run.optimizer.method = parse_optimizer_method(raw.optimizer);
    parse_data_format(c.format);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  c.contract.eps = 1.0 - raw.accuracy;
  c.contract.delta = 1.0 - raw.confidence;
  c.synthetic.kind = c.model.kind;
  c.synthetic.factors = c.model.factors;
  if (raw.classes) c.synthetic.classes = *raw.classes;
  if (c.model.kind == ModelKind::lr) c.synthetic.classes = 2;
  c.synthetic.seed = raw.data_seed.value_or(derive_seed(c.seed, 12));
  return c;
}

void validate(const CliConfig& c) {
  auto usage = [](const std::string& msg) { throw UsageError(msg); };
  const bool needs_labels = c.model.kind != ModelKind::ppca;
  if (c.data_path && needs_labels && c.format == "csv" && !c.label) {
    usage("--label is required for --model " + to_string(c.model.kind));
  }
  if (!(c.holdout_frac > 0.0 && c.holdout_frac < 1.0)) usage("--holdout-frac must be in (0, 1)");
  const bool uses_contract = c.command == Command::train || c.command == Command::size || c.command == Command::coverage;
  if (uses_contract && !(c.contract.eps > 0.0 && c.contract.eps < 1.0)) usage("--accuracy must be in (0, 1)");
  if (!(c.contract.delta > 0.0 && c.contract.delta < 1.0)) usage("--confidence must be in (0, 1)");
  if (c.command == Command::coverage && c.runs < 20) usage("--runs must be at least 20");
  if (c.command == Command::bench) {
    if (c.accuracies.empty()) usage("--accuracies needs at least one value");
    for (double a : c.accuracies) {
      if (!(a >= 0.0 && a < 1.0)) usage("--accuracies values must be in [0, 1)");
    }
    if (c.reps < 1) usage("--reps must be at least 1");
  }
  if (c.n && *c.n < 1) usage("--n must be at least 1");
  if (c.contract.n0 < 1) usage("--n0 must be at least 1");
  if (c.model.beta < 0.0 || !std::isfinite(c.model.beta)) usage("--beta must be finite and >= 0");
  if (c.model.kind == ModelKind::ppca && c.model.factors < 1) usage("--q must be at least 1");
  if (!c.data_path) {
    if (c.synthetic.rows < 2 || c.synthetic.dim < 1) usage("synthetic data needs --rows >= 2 and --dim >= 1");
    if (c.model.kind == ModelKind::me && c.synthetic.classes < 2) usage("--classes must be at least 2");
    if (c.model.kind == ModelKind::ppca && c.model.factors >= c.synthetic.dim) usage("--q must be below --dim");
  }
  try {
    validate(c.run);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

DataSplit prepare_data(CliConfig& c) {
  Dataset data;
  if (c.data_path) {
    data = load_dataset(*c.data_path, parse_data_format(c.format), c.label);
  } else {
    data = make_synthetic(c.synthetic).data;
  }
  if (c.model.kind == ModelKind::lr || c.model.kind == ModelKind::me) {
    auto [encoded, classes] = encode_classes(data);
    if (c.model.kind == ModelKind::lr && classes.classes() != 2) {
      throw InvalidArgument("logistic regression needs exactly 2 label values, found " +
                            std::to_string(classes.classes()));
    }
    c.model.classes = classes.classes();
    data = std::move(encoded);
  }
  c.model.features = data.dim();
  validate(c.model);
  return split(data, c.holdout_frac, derive_seed(c.seed, kSplitStream));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig c;
  try {
    auto parsed = parse_args(args, out);
    if (!parsed) return kExitOk;
    c = std::move(*parsed);
    validate(c);
  } catch (const InvalidArgument& e) {
    err << "approxml: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    DataSplit data = prepare_data(c);
    const std::size_t population = data.train.n_rows();
    if (c.command != Command::accuracy && c.contract.n0 > population) {
      log_warning("--n0 " + std::to_string(c.contract.n0) + " exceeds the " + std::to_string(population) +
                  " training rows; using " + std::to_string(population));
      c.contract.n0 = population;
    }
    // With --out the summary goes to stdout; otherwise stdout carries the output.
    std::ostream& summary = c.out ? out : err;

    switch (c.command) {
      case Command::train:
      case Command::accuracy:
      case Command::size: {
        RunReport r;
        if (c.command == Command::train) {
          r = train_with_contract(data, c.model, c.contract, c.run, c.seed);
        } else if (c.command == Command::accuracy) {
          if (*c.n > population) throw InvalidArgument("--n exceeds the training rows");
          r = estimate_accuracy_only(data, c.model, *c.n, c.contract.delta, c.run, c.seed);
        } else {
          r = estimate_size_only(data, c.model, c.contract, c.run, c.seed);
        }
        json j = to_json(r);
        j["command"] = command_name(c.command);
        j["data"] = data_json(c, data);
        emit(c, out, j.dump(2) + "\n");
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        summary << to_string(r.status) << ": n=" << r.delivered().model.n << " of N=" << population
                << ", eps=" << r.delivered().accuracy.epsilon << " (requested " << c.contract.eps << ")";
        if (r.size_estimate) summary << ", n*=" << r.size_estimate->n_star;
        summary << ", time=" << format_seconds(seconds) << "\n";
        return exit_code(r);
      }
      case Command::coverage: {
        CoverageOptions o;
        o.spec = c.model;
        o.contract = c.contract;
        o.config = c.run;
        o.runs = c.runs;
        o.seed = c.seed;
        o.threads = c.threads;
        CoverageSummary s = run_coverage(data, o);
        std::ostringstream csv;
        write_coverage_csv(csv, s);
        emit(c, out, csv.str());
        summary << "coverage: pass_rate=" << s.pass_rate << " over " << s.runs.size()
                << " runs, v median=" << s.v_median << " p95=" << s.v_p95 << " max=" << s.v_max
                << " (eps " << c.contract.eps << ")";
        if (s.bound_rate) summary << ", generalization bound held in " << *s.bound_rate;
        summary << "\n";
        return kExitOk;
      }
      case Command::bench: {
        BenchOptions o;
        o.spec = c.model;
        o.accuracies = c.accuracies;
        o.delta = c.contract.delta;
        o.n0 = c.contract.n0;
        o.config = c.run;
        o.reps = c.reps;
        o.seed = c.seed;
        o.max_full_rows = c.max_full_rows;
        BenchResult b = run_bench(data, o);
        std::ostringstream csv;
        write_bench_csv(csv, b);
        emit(c, out, csv.str());
        summary << "bench: " << b.rows.size() << " rows, full model " << format_seconds(b.full.seconds) << "\n";
        return kExitOk;
      }
    }
  } catch (const UsageError& e) {
    err << "approxml: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "approxml: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace approxml::cli
