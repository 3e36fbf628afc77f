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

#include "approxml/optimizer.hpp"

#include <cmath>
#include <deque>

namespace approxml {

namespace {

thread_local std::size_t g_invocations = 0;

constexpr double kArmijo = 1e-4;
constexpr double kStepFloor = 1e-12;

struct Point {
  Vector theta;
  double value = 0.0;
  Vector gradient;
};

class InverseHessian {
 public:
  virtual ~InverseHessian() = default;
  virtual Vector direction(const Vector& g) const = 0;
  virtual void update(const Vector& s, const Vector& y) = 0;
  virtual void reset() = 0;
  virtual bool is_reset() const = 0;
};

class DenseBfgs final : public InverseHessian {
 public:
  explicit DenseBfgs(Index n) : h_(Matrix::Identity(n, n)) {}

  Vector direction(const Vector& g) const override { return -(h_ * g); }

  void update(const Vector& s, const Vector& y) override {
    const double sy = s.dot(y);
    if (fresh_) {
      h_ *= sy / y.squaredNorm();
      fresh_ = false;
    }
    const double rho = 1.0 / sy;
    Vector hy = h_ * y;
    const double yhy = y.dot(hy);
    // H+ = H - rho (s hy^T + hy s^T) + (rho^2 yHy + rho) s s^T
    h_.noalias() -= rho * (s * hy.transpose() + hy * s.transpose());
    h_.noalias() += (rho * rho * yhy + rho) * (s * s.transpose());
  }

  void reset() override {
    h_.setIdentity();
    fresh_ = true;
  }
  bool is_reset() const override { return fresh_; }

 private:
  Matrix h_;
  bool fresh_ = true;
};

class LimitedBfgs final : public InverseHessian {
 public:
  explicit LimitedBfgs(std::size_t memory) : memory_(memory) {}

  Vector direction(const Vector& g) const override {
    Vector q = g;
    std::vector<double> alpha(pairs_.size());
    for (std::size_t i = pairs_.size(); i-- > 0;) {
      const auto& [s, y, rho] = pairs_[i];
      alpha[i] = rho * s.dot(q);
      q -= alpha[i] * y;
    }
    if (!pairs_.empty()) {
      const auto& [s, y, rho] = pairs_.back();
      q *= s.dot(y) / y.squaredNorm();
    }
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      const auto& [s, y, rho] = pairs_[i];
      const double beta = rho * y.dot(q);
      q += (alpha[i] - beta) * s;
    }
    return -q;
  }

  void update(const Vector& s, const Vector& y) override {
    pairs_.push_back({s, y, 1.0 / s.dot(y)});
    if (pairs_.size() > memory_) pairs_.pop_front();
  }

  void reset() override { pairs_.clear(); }
  bool is_reset() const override { return pairs_.empty(); }

 private:
  struct Pair {
    Vector s;
    Vector y;
    double rho;
  };
  std::size_t memory_;
  std::deque<Pair> pairs_;
};

Point evaluate_at(const ModelClass& model, const Dataset& data, Vector theta) {
  Point p;
  if (!model.feasible(theta)) {
    p.value = std::numeric_limits<double>::infinity();
    p.theta = std::move(theta);
    return p;
  }
  Evaluation e = model.evaluate(theta, data);
  p.theta = std::move(theta);
  p.value = e.value;
  p.gradient = std::move(e.gradient);
  return p;
}

bool usable(const Point& p) {
  return std::isfinite(p.value) && p.gradient.size() == p.theta.size() && p.gradient.allFinite();
}

}  // namespace

OptimizerMethod parse_optimizer_method(const std::string& name) {
  if (name == "auto") return OptimizerMethod::automatic;
  if (name == "bfgs") return OptimizerMethod::bfgs;
  if (name == "lbfgs") return OptimizerMethod::lbfgs;
  throw InvalidArgument("unknown optimizer '" + name + "' (expected auto, bfgs, lbfgs)");
}

void validate(const OptimizerConfig& config) {
  if (!(config.grad_tol > 0.0)) throw InvalidArgument("grad_tol must be > 0");
  if (config.max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (config.lbfgs_memory < 1) throw InvalidArgument("lbfgs_memory must be >= 1");
}

std::string to_string(OptimizeStatus status) {
  switch (status) {
    case OptimizeStatus::converged: return "converged";
    case OptimizeStatus::max_iterations: return "max_iterations";
    case OptimizeStatus::line_search_failed: return "line_search_failed";
  }
  return "unknown";
}

OptimizeResult minimize(const ModelClass& model, const Dataset& data, const OptimizerConfig& config,
                        const std::optional<Vector>& init) {
  validate(config);
  ++g_invocations;
  const auto dim = static_cast<Index>(model.param_dim());

  OptimizeResult result;
  result.method = config.method;
  if (result.method == OptimizerMethod::automatic) {
    result.method = model.param_dim() < config.dim_switch ? OptimizerMethod::bfgs : OptimizerMethod::lbfgs;
  }
  std::unique_ptr<InverseHessian> approx;
  if (result.method == OptimizerMethod::bfgs) {
    approx = std::make_unique<DenseBfgs>(dim);
  } else {
    approx = std::make_unique<LimitedBfgs>(config.lbfgs_memory);
  }

  Point x = evaluate_at(model, data, init ? *init : model.initial_theta(config.init_seed));
  if (!usable(x)) throw NumericalError("objective or gradient is not finite at the initial point");
  result.trace.push_back(x.value);

  auto finish = [&](OptimizeStatus status) {
    result.status = status;
    result.theta = std::move(x.theta);
    result.objective = x.value;
    result.grad_norm = x.gradient.lpNorm<Eigen::Infinity>();
    return result;
  };

  for (std::size_t iter = 0;; ++iter) {
    if (x.gradient.lpNorm<Eigen::Infinity>() <= config.grad_tol) return finish(OptimizeStatus::converged);
    if (iter >= config.max_iters) return finish(OptimizeStatus::max_iterations);

    Vector p = approx->direction(x.gradient);
    double slope = x.gradient.dot(p);
    if (!(slope < 0.0)) {
      approx->reset();
      p = -x.gradient;
      slope = x.gradient.dot(p);
    }
    if (approx->is_reset()) {
      // Unit steepest-descent steps can be wildly off scale; cap the first trial.
      const double scale = std::min(1.0, 1.0 / p.norm());
      p *= scale;
      slope *= scale;
    }

    std::optional<Point> next;
    for (double step = 1.0; step >= kStepFloor; step *= 0.5) {
      Point trial = evaluate_at(model, data, x.theta + step * p);
      if (std::isfinite(trial.value) && trial.value <= x.value + kArmijo * step * slope) {
        if (!usable(trial)) {
          result.iterations = iter;
          throw NumericalError("gradient is not finite at iterate " + std::to_string(iter));
        }
        next = std::move(trial);
        break;
      }
    }
    if (!next) {
      if (!approx->is_reset()) {
        approx->reset();
        continue;
      }
      result.iterations = iter;
      return finish(OptimizeStatus::line_search_failed);
    }

    Vector s = next->theta - x.theta;
    Vector y = next->gradient - x.gradient;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) approx->update(s, y);
    x = std::move(*next);
    result.trace.push_back(x.value);
    result.iterations = iter + 1;
  }
}

TrainedModel train(const ModelClass& model, const Dataset& data, std::size_t population,
                   const OptimizerConfig& config, const std::optional<Vector>& init) {
  if (data.n_rows() > population) throw InvalidArgument("sample larger than population");
  OptimizeResult r = minimize(model, data, config, init);
  TrainedModel m;
  m.spec = model.spec();
  m.theta = std::move(r.theta);
  m.n = data.n_rows();
  m.population = population;
  m.iterations = r.iterations;
  m.grad_norm = r.grad_norm;
  m.converged = r.converged();
  return m;
}

std::size_t optimizer_invocations() { return g_invocations; }

}  // namespace approxml
