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
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "bpgrad/lipschitz.hpp"
#include "bpgrad/trace.hpp"
#include "bpgrad/types.hpp"

namespace bpgrad {

enum class RhoSchedule {
  kHalvingGap,  // rho <- (1 + rho) / 2
  kHarmonic,    // rho <- 1 - 1 / (m + 1)
};

std::string_view to_string(RhoSchedule schedule);
RhoSchedule parse_rho_schedule(std::string_view name);

/// Next rho after finishing phase `phase` (1-based) at `rho`.
double escalate_rho(RhoSchedule schedule, double rho, std::size_t phase);

struct BranchPruneConfig {
  LipschitzConfig lipschitz;
  /// Distortion/step trade-off of the sampler. Inert: samples stay on the
  /// gradient ray, so only the fallback realizes any distortion.
  double gamma = 0.0;
  std::size_t max_inner_iters = 100000;
  std::size_t max_outer_iters = 1000;
  RhoSchedule rho_schedule = RhoSchedule::kHarmonic;
  std::size_t fallback_attempts = 32;
  /// Relative nudge past a ball surface when exiting it.
  double boundary_slack = 1e-9;

  void validate() const;
};

enum class Termination {
  kEpsilonCriterion,
  kBudgetExhausted,
  kSpaceExhausted,
};

std::string_view to_string(Termination t);

/// Samples accepted while rho held one value.
struct PhaseRecord {
  std::size_t phase = 1;
  double rho = 0.0;
  /// Sample indices [first_index, last_index]; empty when first_index > last_index.
  std::size_t first_index = 1;
  std::size_t last_index = 0;
  /// True when the inner loop ended because no admissible sample remained.
  bool exhausted = false;

  std::size_t count() const { return last_index + 1 - first_index; }
};

struct GlobalResult {
  ParamVector minimizer;
  double minimum = 0.0;
  SampleHistory history;
  double rho_final = 0.0;
  Termination terminated_by = Termination::kBudgetExhausted;
  std::vector<PhaseRecord> phases;
  RunTrace trace;
};

/// Value and gradient oracle. Values must be finite and nonnegative.
struct Objective {
  std::function<double(const ParamVector&)> value;
  std::function<ParamVector(const ParamVector&)> gradient;
};

/// Snapshot handed to the checkpoint observer at the end of every inner loop,
/// before rho is escalated.
struct PhaseCheckpoint {
  const SampleHistory& history;
  LipschitzConfig lipschitz;
  const PhaseRecord& phase;
};

struct GlobalOptions {
  std::optional<ParamVector> start;
  std::function<void(const PhaseCheckpoint&)> on_phase_end;
};

/// Smallest eta >= 0 such that origin - eta * direction leaves every ball of
/// the removable parameter space, nudged by `slack` past the last surface
/// crossed. Returns nullopt when the ray is covered up to the box boundary.
/// Throws kInvalidInput if `direction` is not unit length.
std::optional<double> ray_exit(const SampleHistory& history, const ParamVector& origin,
                               const ParamVector& direction, const LipschitzConfig& cfg,
                               const Box& domain, double slack = 1e-9);

/// Candidate x_{t+1} = x_t - eta * g / |g| just outside the removable space.
/// A zero gradient or a blocked ray falls back to random unit directions.
/// Returns nullopt when every attempt is blocked, which signals that rho
/// should increase.
std::optional<ParamVector> next_sample(const SampleHistory& history,
                                       const ParamVector& grad_at_last,
                                       const BranchPruneConfig& cfg, const Box& domain,
                                       Rng& rng);

/// Branch-and-prune global minimization of a Lipschitz objective over a box.
///
/// The inner loop draws gradient-guided samples outside the removable space
/// until none remains (or `max_inner_iters` is hit); the outer loop then
/// raises rho. The run stops with kEpsilonCriterion as soon as
/// min f <= epsilon, or at the end of an inner loop when
/// min f <= epsilon / (1 - rho).
GlobalResult optimize_global(const Objective& objective, const Box& domain,
                             const BranchPruneConfig& cfg, Rng& rng,
                             const GlobalOptions& options = {});

/// Upper bound on the number of samples with pairwise spacing
/// (1 - rho) f_min / L that fit in a domain of the given volume:
/// [2L / ((1 - rho) f_min)]^d * volume / C_d with C_d the unit-ball volume.
/// `defined` is false (and value is +inf) when f_min <= 0.
struct SampleCountBound {
  double value = 0.0;
  bool defined = true;
};

SampleCountBound sample_count_bound(double L, double rho, double f_min, std::size_t d,
                                    double box_volume);

/// Volume of the unit ball in R^d.
double unit_ball_volume(std::size_t d);

}  // namespace bpgrad
