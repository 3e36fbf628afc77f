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

#include "approxml/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace approxml {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double quantile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Calls fn(i) for i in [0, count) on `threads` workers.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::size_t default_thread_count() {
  if (const char* env = std::getenv("APPROXML_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

FullModel train_full_model(const DataSplit& data, const ModelClassSpec& spec, const OptimizerConfig& config) {
  auto model = make_model_class(spec);
  const auto start = std::chrono::steady_clock::now();
  FullModel out;
  out.model = train(*model, data.train, data.train.n_rows(), config);
  out.seconds = seconds_since(start);
  return out;
}

CoverageSummary run_coverage(const DataSplit& data, const CoverageOptions& options,
                             const std::optional<FullModel>& full) {
  if (options.runs < 1) throw InvalidArgument("coverage needs at least one run");
  CoverageSummary summary;
  summary.full = full ? *full : train_full_model(data, options.spec, options.config.optimizer);
  auto model = make_model_class(options.spec);
  const bool classify = model->classification() && data.holdout.has_labels();
  const std::optional<double> full_error =
      classify ? std::optional(classification_error(*model, summary.full.model.theta, data.holdout)) : std::nullopt;

  summary.runs.resize(options.runs);
  const std::size_t threads = options.threads ? options.threads : default_thread_count();
  parallel_for(options.runs, threads, [&](std::size_t i) {
    CoverageRun& run = summary.runs[i];
    run.index = i;
    run.seed = derive_seed(options.seed, i);
    run.requested_eps = options.contract.eps;
    const std::size_t calls_before = optimizer_invocations();
    const auto start = std::chrono::steady_clock::now();
    RunReport r = train_with_contract(data, options.spec, options.contract, options.config, run.seed);
    run.seconds = seconds_since(start);
    run.optimizer_calls = optimizer_invocations() - calls_before;
    const ModelOutcome& delivered = r.delivered();
    run.delivered_eps = delivered.accuracy.epsilon;
    run.n_used = delivered.model.n;
    run.trainings = r.trainings_performed;
    run.status = r.status;
    run.converged = r.converged();
    run.actual_v = model->diff(delivered.model.theta, summary.full.model.theta, data.holdout);
    run.within = run.actual_v <= options.contract.eps;
    if (r.size_estimate) run.probes = r.size_estimate->probes;
    if (classify) {
      run.approx_error = r.approx_holdout_error;
      run.full_error = full_error;
      run.error_bound = generalization_bound(*r.approx_holdout_error, options.contract.eps);
      run.bound_holds = *full_error <= *run.error_bound;
    }
  });

  std::vector<double> vs;
  std::size_t within = 0;
  std::size_t bound_ok = 0;
  for (const auto& run : summary.runs) {
    vs.push_back(run.actual_v);
    within += run.within;
    bound_ok += run.bound_holds.value_or(false);
  }
  const double runs = static_cast<double>(summary.runs.size());
  summary.pass_rate = static_cast<double>(within) / runs;
  if (classify) summary.bound_rate = static_cast<double>(bound_ok) / runs;
  summary.v_median = quantile(vs, 0.5);
  summary.v_p95 = quantile(vs, 0.95);
  summary.v_max = quantile(vs, 1.0);
  return summary;
}

void write_coverage_csv(std::ostream& out, const CoverageSummary& summary) {
  out << "run,seed,requested_eps,delivered_eps,actual_v,within,n_used,trainings,status,approx_error,"
         "full_error,error_bound,bound_holds,seconds\n";
  auto opt = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string(); };
  for (const auto& r : summary.runs) {
    out << r.index << ',' << r.seed << ',' << r.requested_eps << ',' << r.delivered_eps << ',' << r.actual_v << ','
        << (r.within ? 1 : 0) << ',' << r.n_used << ',' << r.trainings << ',' << to_string(r.status) << ','
        << opt(r.approx_error) << ',' << opt(r.full_error) << ',' << opt(r.error_bound) << ','
        << (r.bound_holds ? std::to_string(*r.bound_holds ? 1 : 0) : std::string()) << ',' << r.seconds << '\n';
  }
}

BenchResult run_bench(const DataSplit& data, const BenchOptions& options) {
  const std::size_t population = data.train.n_rows();
  if (population > options.max_full_rows) {
    throw InvalidArgument("bench trains the full model as ground truth; " + std::to_string(population) +
                          " training rows exceeds the limit of " + std::to_string(options.max_full_rows) +
                          " (subsample the data or raise --max-full-rows)");
  }
  BenchResult result;
  result.full = train_full_model(data, options.spec, options.config.optimizer);
  auto model = make_model_class(options.spec);
  const Vector& truth = result.full.model.theta;

  auto train_sized = [&](std::size_t n, std::uint64_t seed) {
    Dataset sample = uniform_sample(data.train, n, seed);
    return train(*model, sample, population, options.config.optimizer);
  };

  for (std::size_t rep = 0; rep < options.reps; ++rep) {
    for (double acc : options.accuracies) {
      const double eps = 1.0 - acc;
      const std::uint64_t seed = derive_seed(options.seed, rep * 1000 + static_cast<std::uint64_t>(acc * 1e6));
      auto row = [&](std::string strategy) {
        BenchRow r;
        r.strategy = std::move(strategy);
        r.requested_accuracy = acc;
        r.rep = rep;
        return r;
      };

      {
        BenchRow r = row("contract");
        const auto start = std::chrono::steady_clock::now();
        Contract contract{eps, options.delta, std::min(options.n0, population)};
        RunReport rep_report = train_with_contract(data, options.spec, contract, options.config, seed);
        r.seconds = seconds_since(start);
        r.sample_size = rep_report.delivered().model.n;
        r.trainings = rep_report.trainings_performed;
        r.achieved_v = model->diff(rep_report.delivered().model.theta, truth, data.holdout);
        r.met = r.achieved_v <= eps;
        result.rows.push_back(r);
      }
      for (auto strategy : {BaselineStrategy::fixed_ratio, BaselineStrategy::relative_ratio}) {
        BenchRow r = row(to_string(strategy));
        const auto start = std::chrono::steady_clock::now();
        r.sample_size = baseline_size(strategy, eps, population);
        TrainedModel m = train_sized(r.sample_size, seed);
        r.seconds = seconds_since(start);
        r.trainings = 1;
        r.achieved_v = model->diff(m.theta, truth, data.holdout);
        r.met = r.achieved_v <= eps;
        result.rows.push_back(r);
      }
      {
        BenchRow r = row(to_string(BaselineStrategy::inc_estimator));
        const auto start = std::chrono::steady_clock::now();
        for (std::size_t it = 1;; ++it) {
          r.sample_size = baseline_size(BaselineStrategy::inc_estimator, eps, population, it);
          TrainedModel m = train_sized(r.sample_size, seed);
          ++r.trainings;
          r.achieved_v = model->diff(m.theta, truth, data.holdout);
          if (r.achieved_v <= eps || r.sample_size == population) break;
        }
        r.seconds = seconds_since(start);
        r.met = r.achieved_v <= eps;
        result.rows.push_back(r);
      }
    }
  }
  return result;
}

void write_bench_csv(std::ostream& out, const BenchResult& result) {
  out << "strategy,requested_accuracy,rep,achieved_v,sample_size,wall_time,trainings,met\n";
  for (const auto& r : result.rows) {
    out << r.strategy << ',' << r.requested_accuracy << ',' << r.rep << ',' << r.achieved_v << ','
        << r.sample_size << ',' << r.seconds << ',' << r.trainings << ',' << (r.met ? 1 : 0) << '\n';
  }
  out << "full_model,1," << 0 << ',' << 0 << ',' << result.full.model.n << ',' << result.full.seconds << ",1,1\n";
}

}  // namespace approxml
