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

#include "approxml/coordinator.hpp"

#include <chrono>

namespace approxml {

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

ParamSampler build_sampler(const ModelClass& model, const Vector& theta, const Dataset& sample,
                           const RunConfig& config, std::uint64_t seed) {
  switch (config.stats_method) {
    case StatsMethod::closed_form:
      return ParamSampler::from_pair(closed_form(model, theta, sample), seed);
    case StatsMethod::inverse_gradients:
      return ParamSampler::from_pair(inverse_gradients(model, theta, sample, config.inverse_gradients_eps), seed);
    case StatsMethod::observed_fisher:
      break;
  }
  return ParamSampler::from_factors(observed_fisher(model, theta, sample, config.j_diag_eps), seed);
}

// Shared first phase: sample, train, compute statistics, certify.
struct InitialPhase {
  std::unique_ptr<ModelClass> model;
  Dataset eval;
  RunReport report;
  std::optional<ParamSampler> sampler;
  Stopwatch total;
};

InitialPhase run_initial(const DataSplit& data, const ModelClassSpec& spec, std::size_t n, double delta,
                         const RunConfig& config, std::uint64_t seed) {
  validate(config);
  InitialPhase phase;
  phase.model = make_model_class(spec);
  const std::size_t population = data.train.n_rows();
  if (n < 1 || n > population) {
    throw InvalidArgument("initial sample size " + std::to_string(n) + " outside [1, " + std::to_string(population) +
                          "]");
  }
  RunReport& r = phase.report;
  r.spec = spec;
  r.config = config;
  r.seeds = Seeds::from_master(seed);
  phase.eval = evaluation_rows(data.holdout, config.eval_rows, r.seeds.eval_rows);

  Stopwatch watch;
  Dataset sample = uniform_sample(data.train, n, r.seeds.sample);
  r.initial.model = train(*phase.model, sample, population, config.optimizer);
  r.trainings_performed = 1;
  r.timings.initial_training = watch.lap();

  phase.sampler.emplace(build_sampler(*phase.model, r.initial.model.theta, sample, config, r.seeds.sampler));
  r.timings.statistics = watch.lap();

  r.initial.accuracy = estimate_error_bound(*phase.model, r.initial.model, *phase.sampler, phase.eval, delta,
                                            config.k, kAccuracyStream);
  r.timings.accuracy = watch.lap();
  return phase;
}

void attach_generalization(RunReport& r, const ModelClass& model, const Dataset& holdout) {
  if (!model.classification() || !holdout.has_labels()) return;
  const ModelOutcome& out = r.delivered();
  const double eg = classification_error(model, out.model.theta, holdout);
  r.approx_holdout_error = eg;
  r.full_error_bound = generalization_bound(eg, std::min(out.accuracy.epsilon, 1.0));
}

}  // namespace

void validate(const Contract& contract) {
  if (!(contract.eps > 0.0 && contract.eps < 1.0)) throw InvalidArgument("contract eps must lie in (0, 1)");
  if (!(contract.delta > 0.0 && contract.delta < 1.0)) throw InvalidArgument("contract delta must lie in (0, 1)");
  if (contract.n0 < 1) throw InvalidArgument("initial sample size must be >= 1");
}

void validate(const RunConfig& config) {
  validate(config.optimizer);
  if (config.k < 2 || config.size_k < 2) throw InvalidArgument("draw counts must be >= 2");
  if (!(config.j_diag_eps >= 0.0)) throw InvalidArgument("j_diag_eps must be >= 0");
}

Seeds Seeds::from_master(std::uint64_t master) {
  return {master, derive_seed(master, 1), derive_seed(master, 2), derive_seed(master, 3)};
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::contract_met: return "contract_met";
    case RunStatus::saturated: return "saturated";
    case RunStatus::not_certified: return "not_certified";
    case RunStatus::accuracy_only: return "accuracy_only";
    case RunStatus::size_only: return "size_only";
  }
  return "unknown";
}

bool RunReport::converged() const {
  return initial.model.converged && (!final_model || final_model->model.converged);
}

Dataset evaluation_rows(const Dataset& holdout, std::size_t eval_rows, std::uint64_t seed) {
  if (eval_rows == 0 || holdout.n_rows() <= eval_rows) return holdout;
  return uniform_sample(holdout, eval_rows, seed);
}

double classification_error(const ModelClass& model, const Vector& theta, const Dataset& data) {
  Vector pred = model.predict(theta, data.features());
  return static_cast<double>((pred.array() != data.labels().array()).count()) / static_cast<double>(data.n_rows());
}

double generalization_bound(double eps_g, double eps) {
  if (!(eps_g >= 0.0 && eps_g <= 1.0) || !(eps >= 0.0 && eps <= 1.0)) {
    throw InvalidArgument("generalization bound inputs must lie in [0, 1]");
  }
  return eps_g + eps * (1.0 - eps_g);
}

RunReport train_with_contract(const DataSplit& data, const ModelClassSpec& spec, const Contract& contract,
                              const RunConfig& config, std::uint64_t seed) {
  validate(contract);
  InitialPhase phase = run_initial(data, spec, contract.n0, contract.delta, config, seed);
  RunReport& r = phase.report;
  r.contract = contract;
  const ModelClass& model = *phase.model;
  const std::size_t population = data.train.n_rows();

  if (r.initial.accuracy.epsilon <= contract.eps) {
    r.status = RunStatus::contract_met;
  } else {
    Stopwatch watch;
    r.size_estimate = min_sample_size(model, r.initial.model.theta, *phase.sampler, phase.eval, contract.n0,
                                      population, contract.eps, contract.delta, config.size_k, kSizeStream);
    r.timings.size_search = watch.lap();

    // Same seed: the larger sample extends the initial one.
    Dataset sample = uniform_sample(data.train, r.size_estimate->n_star, r.seeds.sample);
    ModelOutcome fin;
    fin.model = train(model, sample, population, config.optimizer, r.initial.model.theta);
    r.trainings_performed = 2;
    r.timings.final_training = watch.lap();

    ParamSampler sampler = build_sampler(model, fin.model.theta, sample, config, derive_seed(r.seeds.sampler, 7));
    r.timings.final_statistics = watch.lap();
    fin.accuracy = estimate_error_bound(model, fin.model, sampler, phase.eval, contract.delta, config.k,
                                        kAccuracyStream);
    r.timings.final_accuracy = watch.lap();
    r.final_model = std::move(fin);

    if (r.size_estimate->saturated) {
      r.status = RunStatus::saturated;
    } else if (r.final_model->accuracy.epsilon <= contract.eps) {
      r.status = RunStatus::contract_met;
    } else {
      r.status = RunStatus::not_certified;
    }
  }
  attach_generalization(r, model, data.holdout);
  r.timings.total = phase.total.lap();
  return r;
}

RunReport estimate_accuracy_only(const DataSplit& data, const ModelClassSpec& spec, std::size_t n, double delta,
                                 const RunConfig& config, std::uint64_t seed) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  InitialPhase phase = run_initial(data, spec, n, delta, config, seed);
  RunReport& r = phase.report;
  r.contract = {r.initial.accuracy.epsilon, delta, n};
  r.status = RunStatus::accuracy_only;
  attach_generalization(r, *phase.model, data.holdout);
  r.timings.total = phase.total.lap();
  return r;
}

RunReport estimate_size_only(const DataSplit& data, const ModelClassSpec& spec, const Contract& contract,
                             const RunConfig& config, std::uint64_t seed) {
  validate(contract);
  InitialPhase phase = run_initial(data, spec, contract.n0, contract.delta, config, seed);
  RunReport& r = phase.report;
  r.contract = contract;
  Stopwatch watch;
  r.size_estimate = min_sample_size(*phase.model, r.initial.model.theta, *phase.sampler, phase.eval, contract.n0,
                                    data.train.n_rows(), contract.eps, contract.delta, config.size_k, kSizeStream);
  r.timings.size_search = watch.lap();
  r.status = RunStatus::size_only;
  r.timings.total = phase.total.lap();
  return r;
}

}  // namespace approxml
