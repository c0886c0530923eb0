// Copyright 2026 The bpgrad Authors
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

#include "bpgrad/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "bpgrad/error.hpp"

namespace bpgrad {

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kBpgrad: return "bpgrad";
    case SolverKind::kSgdMomentum: return "sgd-momentum";
    case SolverKind::kAdagrad: return "adagrad";
    case SolverKind::kAdadelta: return "adadelta";
    case SolverKind::kRmsprop: return "rmsprop";
    case SolverKind::kAdam: return "adam";
  }
  return "unknown";
}

SolverKind parse_solver_kind(std::string_view name) {
  for (SolverKind k : {SolverKind::kBpgrad, SolverKind::kSgdMomentum, SolverKind::kAdagrad,
                       SolverKind::kAdadelta, SolverKind::kRmsprop, SolverKind::kAdam}) {
    if (to_string(k) == name) return k;
  }
  if (name == "sgd") return SolverKind::kSgdMomentum;
  throw Error(ErrorKind::kInvalidInput, fmt::format("unknown solver '{}'", name));
}

void SolverConfig::validate() const {
  if (kind == SolverKind::kBpgrad) {
    if (!(L > 0.0)) throw Error(ErrorKind::kInvalidInput, "L must be positive");
    if (evals_per_phase == 0 || max_phases == 0) {
      throw Error(ErrorKind::kInvalidInput, "evals_per_phase and max_phases must be >= 1");
    }
    if (!(epsilon >= 0.0)) throw Error(ErrorKind::kInvalidInput, "epsilon must be nonnegative");
  } else if (!(learning_rate > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "learning_rate must be positive");
  }
  if (!(mu >= 0.0 && mu <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput, fmt::format("momentum must lie in [0, 1], got {}", mu));
  }
  if (condition_window == 0) throw Error(ErrorKind::kInvalidInput, "condition_window must be >= 1");
}

SolverState SolverState::initial(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  SolverState s;
  s.velocity = ParamVector::Zero(n);
  s.accum1 = ParamVector::Zero(n);
  s.accum2 = ParamVector::Zero(n);
  return s;
}

namespace {

void check_inputs(const SolverState& state, const ParamVector& x_t, double f_t,
                  const ParamVector& grad) {
  if (x_t.size() != grad.size() || x_t.size() != state.velocity.size()) {
    throw Error(ErrorKind::kInvalidInput,
                fmt::format("iteration {}: dimension mismatch", state.iter + 1));
  }
  if (!std::isfinite(f_t)) {
    throw Error(ErrorKind::kNumericFailure,
                fmt::format("iteration {}: objective is not finite ({})", state.iter + 1, f_t));
  }
  if (!grad.allFinite() || !x_t.allFinite()) {
    throw Error(ErrorKind::kNumericFailure,
                fmt::format("iteration {}: non-finite gradient or parameters", state.iter + 1));
  }
}

void observe(SolverState& state, double f_t) {
  if (!state.has_min || f_t < state.running_min) state.running_min = f_t;
  state.has_min = true;
}

}  // namespace

double bpgrad_step_size(double f_t, double running_min, double rho, double L) {
  return std::max(0.0, (f_t - rho * running_min) / L);
}

StepResult bpgrad_update(SolverState& state, const ParamVector& x_t, double f_t,
                         const ParamVector& grad, const SolverConfig& cfg, Rng& rng) {
  check_inputs(state, x_t, f_t, grad);
  observe(state, f_t);

  const double eta = bpgrad_step_size(f_t, state.running_min, state.rho, cfg.L);
  const double gnorm = grad.norm();
  const ParamVector unit =
      gnorm > 0.0 ? ParamVector(grad / gnorm)
                  : random_unit_vector(static_cast<std::size_t>(grad.size()), rng);

  state.velocity = cfg.mu * state.velocity - eta * unit;
  StepResult out{x_t + state.velocity, eta};
  ++state.iter;

  if (state.iter >= state.phase * cfg.evals_per_phase) {
    if (state.running_min <= cfg.epsilon / (1.0 - state.rho)) {
      out.converged = true;
    } else if (state.phase >= cfg.max_phases) {
      out.phases_exhausted = true;
    } else {
      ++state.phase;
      state.rho = 1.0 - 1.0 / static_cast<double>(state.phase);
    }
  }
  return out;
}

StepResult baseline_update(SolverState& state, const ParamVector& x_t, double f_t,
                           const ParamVector& grad, const SolverConfig& cfg) {
  check_inputs(state, x_t, f_t, grad);
  observe(state, f_t);
  ++state.iter;

  const double lr = cfg.learning_rate;
  ParamVector next;
  switch (cfg.kind) {
    case SolverKind::kSgdMomentum:
      state.velocity = cfg.mu * state.velocity - lr * grad;
      next = x_t + state.velocity;
      break;
    case SolverKind::kAdagrad:
      state.accum1.array() += grad.array().square();
      next = x_t.array() - lr * grad.array() / (state.accum1.array().sqrt() + cfg.adagrad_delta);
      break;
    case SolverKind::kAdadelta: {
      // accum1: E[g^2], accum2: E[dx^2]
      const double r = cfg.adadelta_decay;
      const double eps = cfg.adadelta_delta;
      state.accum1 = r * state.accum1.array() + (1.0 - r) * grad.array().square();
      const ParamVector dx = -((state.accum2.array() + eps).sqrt() /
                               (state.accum1.array() + eps).sqrt() * grad.array())
                                  .matrix();
      state.accum2 = r * state.accum2.array() + (1.0 - r) * dx.array().square();
      next = x_t + lr * dx;
      break;
    }
    case SolverKind::kRmsprop: {
      const double a = cfg.rmsprop_decay;
      state.accum1 = a * state.accum1.array() + (1.0 - a) * grad.array().square();
      next = x_t.array() - lr * grad.array() / (state.accum1.array().sqrt() + cfg.rmsprop_delta);
      break;
    }
    case SolverKind::kAdam: {
      const double b1 = cfg.beta1;
      const double b2 = cfg.beta2;
      const double t = static_cast<double>(state.iter);
      state.accum1 = b1 * state.accum1 + (1.0 - b1) * grad;
      state.accum2 = b2 * state.accum2.array() + (1.0 - b2) * grad.array().square();
      const ParamVector m_hat = state.accum1 / (1.0 - std::pow(b1, t));
      const ParamVector v_hat = state.accum2 / (1.0 - std::pow(b2, t));
      next = x_t.array() - lr * m_hat.array() / (v_hat.array().sqrt() + cfg.adam_delta);
      break;
    }
    case SolverKind::kBpgrad:
      throw Error(ErrorKind::kInvalidInput, "baseline_update called with the bpgrad solver");
  }
  return {std::move(next), lr};
}

Solver::Solver(SolverConfig cfg, std::size_t dim, std::uint64_t seed)
    : cfg_(std::move(cfg)), state_(SolverState::initial(dim)), rng_(seed) {
  cfg_.validate();
}

StepResult Solver::step(const ParamVector& x_t, double f_t, const ParamVector& grad) {
  if (cfg_.kind == SolverKind::kBpgrad) return bpgrad_update(state_, x_t, f_t, grad, cfg_, rng_);
  return baseline_update(state_, x_t, f_t, grad, cfg_);
}

WindowSample make_window_sample(const ParamVector& x, double f) {
  WindowSample s;
  s.point.resize(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) s.point[static_cast<std::size_t>(i)] = static_cast<float>(x[i]);
  s.value = f;
  return s;
}

namespace {

double snapshot_distance(const WindowSample& s, const ParamVector& x) {
  if (s.point.size() != static_cast<std::size_t>(x.size())) {
    throw Error(ErrorKind::kInvalidInput, "window sample dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < s.point.size(); ++i) {
    const double diff = static_cast<double>(s.point[i]) - x[static_cast<Eigen::Index>(i)];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

}  // namespace

ConditionRecord check_condition(std::span<const WindowSample> window,
                                const ParamVector& x_next, double rho, double L,
                                std::size_t iter) {
  if (window.empty()) {
    return {iter, -std::numeric_limits<double>::infinity(), 0.0, true};
  }
  double lhs = -std::numeric_limits<double>::infinity();
  double min_f = std::numeric_limits<double>::infinity();
  for (const WindowSample& s : window) {
    lhs = std::max(lhs, s.value - L * snapshot_distance(s, x_next));
    min_f = std::min(min_f, s.value);
  }
  const double rhs = rho * min_f;
  return {iter, lhs, rhs, lhs <= rhs};
}

bool check_monotone_direction(std::span<const WindowSample> window, const ParamVector& x_j,
                              const ParamVector& grad_unit_at_j) {
  for (const WindowSample& s : window) {
    if (s.point.size() != static_cast<std::size_t>(x_j.size())) {
      throw Error(ErrorKind::kInvalidInput, "window sample dimension mismatch");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < s.point.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      dot += (static_cast<double>(s.point[i]) - x_j[k]) * grad_unit_at_j[k];
    }
    if (dot < 0.0) return false;
  }
  return true;
}

ConditionWindow::ConditionWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error(ErrorKind::kInvalidInput, "window capacity must be >= 1");
  samples_.reserve(capacity);
}

void ConditionWindow::push(const ParamVector& x, double f) {
  if (samples_.size() == capacity_) samples_.erase(samples_.begin());
  samples_.push_back(make_window_sample(x, f));
}

}  // namespace bpgrad
