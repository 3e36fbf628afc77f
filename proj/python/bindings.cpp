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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "approxml/coordinator.hpp"
#include "approxml/report.hpp"
#include "approxml/stats.hpp"
#include "approxml/synthetic.hpp"

namespace py = pybind11;
using namespace approxml;

namespace {

py::object to_python(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

ModelClassSpec spec_for(const Dataset& data, const std::string& kind, double beta, std::size_t q,
                        std::optional<std::size_t> classes) {
  ModelClassSpec spec;
  spec.kind = parse_model_kind(kind);
  spec.beta = beta;
  spec.features = data.dim();
  spec.factors = q;
  if (spec.kind == ModelKind::lr) spec.classes = 2;
  if (spec.kind == ModelKind::me) {
    spec.classes = classes ? *classes : static_cast<std::size_t>(data.labels().maxCoeff()) + 1;
  }
  validate(spec);
  return spec;
}

RunConfig run_config(const std::string& stats_method, std::size_t k, double grad_tol, std::size_t max_iters) {
  RunConfig c;
  c.stats_method = parse_stats_method(stats_method);
  c.k = k;
  c.size_k = k;
  c.optimizer.grad_tol = grad_tol;
  c.optimizer.max_iters = max_iters;
  return c;
}

class PyModel {
 public:
  PyModel(const std::string& kind, std::size_t features, double beta, std::size_t classes, std::size_t q) {
    ModelClassSpec spec;
    spec.kind = parse_model_kind(kind);
    spec.features = features;
    spec.beta = beta;
    spec.classes = classes;
    spec.factors = q;
    model_ = make_model_class(spec);
  }
  const ModelClass& get() const { return *model_; }

 private:
  std::unique_ptr<ModelClass> model_;
};

}  // namespace

PYBIND11_MODULE(_approxml, m) {
  m.doc() = "Approximate maximum-likelihood training with accuracy contracts";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<UnsupportedOperation>(m, "UnsupportedOperation", PyExc_NotImplementedError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](FeatureMatrix::Dense x, std::optional<Vector> y) {
             return Dataset(FeatureMatrix(std::move(x)), std::move(y));
           }),
           py::arg("x"), py::arg("y") = py::none())
      .def_property_readonly("n_rows", &Dataset::n_rows)
      .def_property_readonly("dim", &Dataset::dim)
      .def_property_readonly("has_labels", &Dataset::has_labels)
      .def_property_readonly("x", [](const Dataset& d) { return d.features().to_dense(); })
      .def_property_readonly("y", [](const Dataset& d) { return d.maybe_labels(); })
      .def("__len__", &Dataset::n_rows);

  m.def(
      "load_dataset",
      [](const std::string& path, const std::string& format, std::optional<std::string> label) {
        return load_dataset(path, parse_data_format(format), label);
      },
      py::arg("path"), py::arg("format") = "csv", py::arg("label") = py::none());

  m.def(
      "encode_classes",
      [](const Dataset& d) {
        auto [encoded, enc] = encode_classes(d);
        return py::make_tuple(encoded, enc.values);
      },
      py::arg("data"));

  m.def(
      "split",
      [](const Dataset& d, double frac, std::uint64_t seed) {
        DataSplit s = split(d, frac, seed);
        return py::make_tuple(s.train, s.holdout);
      },
      py::arg("data"), py::arg("holdout_frac") = 0.2, py::arg("seed") = 1);

  m.def(
      "make_synthetic",
      [](const std::string& kind, std::size_t rows, std::size_t dim, std::size_t classes, std::size_t q,
         double signal, double noise, std::uint64_t seed) {
        SyntheticSpec s;
        s.kind = parse_model_kind(kind);
        s.rows = rows;
        s.dim = dim;
        s.classes = classes;
        s.factors = q;
        s.signal = signal;
        s.noise = noise;
        s.seed = seed;
        SyntheticData out = make_synthetic(s);
        return py::make_tuple(out.data, out.truth);
      },
      py::arg("kind"), py::arg("rows"), py::arg("dim"), py::arg("classes") = 3, py::arg("q") = 1,
      py::arg("signal") = 2.0, py::arg("noise") = 1.0, py::arg("seed") = 1);

  py::class_<PyModel>(m, "Model")
      .def(py::init<const std::string&, std::size_t, double, std::size_t, std::size_t>(), py::arg("kind"),
           py::arg("features"), py::arg("beta") = 0.001, py::arg("classes") = 2, py::arg("q") = 10)
      .def_property_readonly("param_dim", [](const PyModel& p) { return p.get().param_dim(); })
      .def("grads", [](const PyModel& p, const Vector& t, const Dataset& d) { return p.get().grads(t, d); })
      .def("objective", [](const PyModel& p, const Vector& t, const Dataset& d) { return p.get().objective(t, d); })
      .def("gradient", [](const PyModel& p, const Vector& t, const Dataset& d) { return p.get().gradient(t, d); })
      .def("predict",
           [](const PyModel& p, const Vector& t, const Dataset& d) { return p.get().predict(t, d.features()); })
      .def("diff", [](const PyModel& p, const Vector& a, const Vector& b, const Dataset& h) {
        return p.get().diff(a, b, h);
      })
      .def(
          "train",
          [](const PyModel& p, const Dataset& d, std::optional<std::size_t> population, double grad_tol,
             std::size_t max_iters) {
            OptimizerConfig c;
            c.grad_tol = grad_tol;
            c.max_iters = max_iters;
            return to_python(to_json(train(p.get(), d, population.value_or(d.n_rows()), c)));
          },
          py::arg("data"), py::arg("population") = py::none(), py::arg("grad_tol") = 1e-6,
          py::arg("max_iters") = 500)
      .def(
          "observed_fisher",
          [](const PyModel& p, const Vector& t, const Dataset& d) {
            StatFactors f = observed_fisher(p.get(), t, d);
            return py::make_tuple(f.U, f.s);
          },
          py::arg("theta"), py::arg("data"));

  m.def(
      "train_with_contract",
      [](const Dataset& train, const Dataset& holdout, const std::string& model, double accuracy,
         double confidence, std::size_t n0, double beta, std::size_t q, std::optional<std::size_t> classes,
         const std::string& stats_method, std::size_t k, double grad_tol, std::size_t max_iters,
         std::uint64_t seed) {
        DataSplit data{train, holdout, 0};
        Contract contract{1.0 - accuracy, 1.0 - confidence, std::min(n0, train.n_rows())};
        RunReport r = train_with_contract(data, spec_for(train, model, beta, q, classes), contract,
                                          run_config(stats_method, k, grad_tol, max_iters), seed);
        return to_python(to_json(r));
      },
      py::arg("train"), py::arg("holdout"), py::arg("model"), py::arg("accuracy") = 0.95,
      py::arg("confidence") = 0.95, py::arg("n0") = 10000, py::arg("beta") = 0.001, py::arg("q") = 10,
      py::arg("classes") = py::none(), py::arg("stats_method") = "observed-fisher", py::arg("k") = 100,
      py::arg("grad_tol") = 1e-6, py::arg("max_iters") = 500, py::arg("seed") = 1);

  m.def(
      "estimate_accuracy",
      [](const Dataset& train, const Dataset& holdout, const std::string& model, std::size_t n, double confidence,
         double beta, std::size_t q, std::optional<std::size_t> classes, const std::string& stats_method,
         std::size_t k, std::uint64_t seed) {
        DataSplit data{train, holdout, 0};
        RunReport r = estimate_accuracy_only(data, spec_for(train, model, beta, q, classes), n, 1.0 - confidence,
                                             run_config(stats_method, k, 1e-6, 500), seed);
        return to_python(to_json(r));
      },
      py::arg("train"), py::arg("holdout"), py::arg("model"), py::arg("n"), py::arg("confidence") = 0.95,
      py::arg("beta") = 0.001, py::arg("q") = 10, py::arg("classes") = py::none(),
      py::arg("stats_method") = "observed-fisher", py::arg("k") = 100, py::arg("seed") = 1);

  m.def(
      "estimate_size",
      [](const Dataset& train, const Dataset& holdout, const std::string& model, double accuracy, double confidence,
         std::size_t n0, double beta, std::size_t q, std::optional<std::size_t> classes,
         const std::string& stats_method, std::size_t k, std::uint64_t seed) {
        DataSplit data{train, holdout, 0};
        Contract contract{1.0 - accuracy, 1.0 - confidence, std::min(n0, train.n_rows())};
        RunReport r = estimate_size_only(data, spec_for(train, model, beta, q, classes), contract,
                                         run_config(stats_method, k, 1e-6, 500), seed);
        return to_python(to_json(r));
      },
      py::arg("train"), py::arg("holdout"), py::arg("model"), py::arg("accuracy") = 0.95,
      py::arg("confidence") = 0.95, py::arg("n0") = 10000, py::arg("beta") = 0.001, py::arg("q") = 10,
      py::arg("classes") = py::none(), py::arg("stats_method") = "observed-fisher", py::arg("k") = 100,
      py::arg("seed") = 1);

  m.def("generalization_bound", &generalization_bound, py::arg("eps_g"), py::arg("eps"));
}
