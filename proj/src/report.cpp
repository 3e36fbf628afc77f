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

#include "approxml/report.hpp"

namespace approxml {

namespace {

std::vector<double> to_array(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector from_array(const json& j) {
  auto values = j.get<std::vector<double>>();
  return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

}  // namespace

json to_json(const ModelClassSpec& spec) {
  json j = {{"class", to_string(spec.kind)}, {"beta", spec.beta}, {"d", spec.features}};
  if (spec.kind == ModelKind::me || spec.kind == ModelKind::lr) j["K"] = spec.classes;
  if (spec.kind == ModelKind::ppca) j["q"] = spec.factors;
  return j;
}

json to_json(const TrainedModel& model) {
  json j = to_json(model.spec);
  j["theta"] = to_array(model.theta);
  j["n"] = model.n;
  j["N"] = model.population;
  j["layout"] = layout_description(model.spec);
  j["iterations"] = model.iterations;
  j["grad_norm"] = model.grad_norm;
  j["converged"] = model.converged;
  return j;
}

TrainedModel trained_model_from_json(const json& j) {
  TrainedModel m;
  m.spec.kind = parse_model_kind(j.at("class").get<std::string>());
  m.spec.beta = j.at("beta").get<double>();
  m.spec.features = j.at("d").get<std::size_t>();
  if (j.contains("K")) m.spec.classes = j.at("K").get<std::size_t>();
  if (j.contains("q")) m.spec.factors = j.at("q").get<std::size_t>();
  validate(m.spec);
  m.theta = from_array(j.at("theta"));
  if (static_cast<std::size_t>(m.theta.size()) != param_dim(m.spec)) {
    throw InvalidArgument("serialized theta length does not match the model layout");
  }
  m.n = j.at("n").get<std::size_t>();
  m.population = j.at("N").get<std::size_t>();
  m.iterations = j.value("iterations", std::size_t{0});
  m.grad_norm = j.value("grad_norm", 0.0);
  m.converged = j.value("converged", true);
  return m;
}

json to_json(const StatFactors& factors) {
  return {{"rows", factors.U.rows()},
          {"cols", factors.U.cols()},
          {"U", std::vector<double>(factors.U.data(), factors.U.data() + factors.U.size())},
          {"s", to_array(factors.s)},
          {"beta", factors.beta},
          {"n", factors.n}};
}

StatFactors stat_factors_from_json(const json& j) {
  StatFactors f;
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  auto u = j.at("U").get<std::vector<double>>();
  if (static_cast<Index>(u.size()) != rows * cols) throw InvalidArgument("U size does not match its shape");
  f.U = Eigen::Map<Matrix>(u.data(), rows, cols);
  f.s = from_array(j.at("s"));
  if (f.s.size() != cols) throw InvalidArgument("singular value count does not match U");
  f.beta = j.at("beta").get<double>();
  f.n = j.at("n").get<std::size_t>();
  return f;
}

json to_json(const AccuracyReport& report) {
  return {{"epsilon", report.epsilon},     {"delta", report.delta},         {"k", report.k},
          {"tau", report.tau},             {"clamped", report.clamped},     {"v_samples", report.v_samples}};
}

json to_json(const SizeEstimate& estimate) {
  json probes = json::array();
  for (const auto& p : estimate.probes) {
    probes.push_back({{"n", p.n},
                      {"p_raw", p.raw},
                      {"p_conservative", p.conservative},
                      {"alpha1", p.alpha1},
                      {"alpha2", p.alpha2},
                      {"pass", p.pass}});
  }
  return {{"n_star", estimate.n_star}, {"k", estimate.k}, {"saturated", estimate.saturated}, {"probes", probes}};
}

json to_json(const RunReport& r) {
  json j;
  j["status"] = to_string(r.status);
  j["model"] = to_json(r.spec);
  j["contract"] = {{"eps", r.contract.eps}, {"delta", r.contract.delta}, {"n0", r.contract.n0}};
  j["config"] = {{"stats_method", to_string(r.config.stats_method)},
                 {"k", r.config.k},
                 {"size_k", r.config.size_k},
                 {"grad_tol", r.config.optimizer.grad_tol},
                 {"max_iters", r.config.optimizer.max_iters},
                 {"j_diag_eps", r.config.j_diag_eps},
                 {"eval_rows", r.config.eval_rows}};
  j["seeds"] = {{"master", r.seeds.master},
                {"sample", r.seeds.sample},
                {"sampler", r.seeds.sampler},
                {"eval_rows", r.seeds.eval_rows}};
  j["initial"] = {{"model", to_json(r.initial.model)}, {"accuracy", to_json(r.initial.accuracy)}};
  j["final"] = r.final_model
                   ? json{{"model", to_json(r.final_model->model)}, {"accuracy", to_json(r.final_model->accuracy)}}
                   : json(nullptr);
  j["size_estimate"] = r.size_estimate ? to_json(*r.size_estimate) : json(nullptr);
  j["trainings_performed"] = r.trainings_performed;
  j["delivered"] = {{"n", r.delivered().model.n},
                    {"epsilon", r.delivered().accuracy.epsilon},
                    {"accuracy", 1.0 - r.delivered().accuracy.epsilon}};
  j["generalization"] = r.approx_holdout_error
                            ? json{{"approx_holdout_error", *r.approx_holdout_error},
                                   {"full_error_bound", *r.full_error_bound}}
                            : json(nullptr);
  j["converged"] = r.converged();
  j["timings"] = {{"initial_training", r.timings.initial_training},
                  {"statistics", r.timings.statistics},
                  {"accuracy", r.timings.accuracy},
                  {"size_search", r.timings.size_search},
                  {"final_training", r.timings.final_training},
                  {"final_statistics", r.timings.final_statistics},
                  {"final_accuracy", r.timings.final_accuracy},
                  {"total", r.timings.total}};
  return j;
}

}  // namespace approxml
