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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bpgrad/types.hpp"

namespace bpgrad {

enum class SolverKind { kBpgrad, kSgdMomentum, kAdagrad, kAdadelta, kRmsprop, kAdam };

std::string_view to_string(SolverKind kind);
SolverKind parse_solver_kind(std::string_view name);

struct SolverConfig {
  SolverKind kind = SolverKind::kBpgrad;

  // bpgrad
  double L = 15.0;
  double mu = 0.9;
  std::size_t evals_per_phase = 1000;  // n
  std::size_t max_phases = 1;          // N
  double epsilon = 0.0;

  // baselines
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_delta = 1e-8;
  double adagrad_delta = 1e-8;
  double rmsprop_decay = 0.9;
  double rmsprop_delta = 1e-8;
  double adadelta_decay = 0.95;
  double adadelta_delta = 1e-6;

  // condition monitor
  std::size_t condition_window = 50;

  void validate() const;
};

/// Mutable per-run state. `accum1`/`accum2` hold the solver-specific
/// per-coordinate statistics (squared-gradient sums, moment estimates).
struct SolverState {
  ParamVector velocity;
  double running_min = 0.0;
  bool has_min = false;
  double rho = 0.0;
  std::size_t phase = 1;
  std::size_t iter = 0;
  ParamVector accum1;
  ParamVector accum2;

  static SolverState initial(std::size_t dim);
};

struct StepResult {
  ParamVector next;
  double eta = 0.0;
  /// min f <= epsilon / (1 - rho) held at a phase boundary.
  bool converged = false;
  /// All `max_phases` phases have been run.
  bool phases_exhausted = false;
};

/// max(0, (f_t - rho * running_min) / L).
double bpgrad_step_size(double f_t, double running_min, double rho, double L);

/// One step of the momentum branch-and-prune solver:
/// v <- mu v - eta_t g/|g|, x <- x + v. Advances the phase every
/// `evals_per_phase` iterations with rho = 1 - 1/m.
StepResult bpgrad_update(SolverState& state, const ParamVector& x_t, double f_t,
                         const ParamVector& grad, const SolverConfig& cfg, Rng& rng);

/// Standard recurrence for the baseline named by `cfg.kind`.
StepResult baseline_update(SolverState& state, const ParamVector& x_t, double f_t,
                           const ParamVector& grad, const SolverConfig& cfg);

/// Owns config, state and RNG for one run; dispatches on `SolverKind`.
class Solver {
 public:
  Solver(SolverConfig cfg, std::size_t dim, std::uint64_t seed);

  StepResult step(const ParamVector& x_t, double f_t, const ParamVector& grad);

  const SolverConfig& config() const { return cfg_; }
  const SolverState& state() const { return state_; }

 private:
  SolverConfig cfg_;
  SolverState state_;
  Rng rng_;
};

// Condition monitoring -------------------------------------------------------

/// Parameter snapshot stored at single precision.
struct WindowSample {
  std::vector<float> point;
  double value = 0.0;
};

struct ConditionRecord {
  std::size_t iter = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = true;
};

/// Sampling-rule check for x_next against the window:
/// lhs = max_i { f_i - L |x_i - x_next| }, rhs = rho * min_i f_i.
/// An empty window gives a vacuous record (lhs = -inf, rhs = 0, satisfied).
ConditionRecord check_condition(std::span<const WindowSample> window,
                                const ParamVector& x_next, double rho, double L,
                                std::size_t iter = 0);

/// True iff <x_i - x_j, g_j> >= 0 for every i in the window.
bool check_monotone_direction(std::span<const WindowSample> window, const ParamVector& x_j,
                              const ParamVector& grad_unit_at_j);

/// Bounded FIFO of the most recent samples.
class ConditionWindow {
 public:
  explicit ConditionWindow(std::size_t capacity);

  void push(const ParamVector& x, double f);
  std::span<const WindowSample> samples() const { return samples_; }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::vector<WindowSample> samples_;
};

WindowSample make_window_sample(const ParamVector& x, double f);

}  // namespace bpgrad
