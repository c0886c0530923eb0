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

#include "bpgrad/branch_prune.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include <fmt/core.h>

#include "bpgrad/error.hpp"

namespace bpgrad {

std::string_view to_string(RhoSchedule schedule) {
  switch (schedule) {
    case RhoSchedule::kHalvingGap: return "halving-gap";
    case RhoSchedule::kHarmonic: return "harmonic";
  }
  return "unknown";
}

RhoSchedule parse_rho_schedule(std::string_view name) {
  if (name == "halving-gap") return RhoSchedule::kHalvingGap;
  if (name == "harmonic") return RhoSchedule::kHarmonic;
  throw Error(ErrorKind::kInvalidInput, fmt::format("unknown rho schedule '{}'", name));
}

double escalate_rho(RhoSchedule schedule, double rho, std::size_t phase) {
  switch (schedule) {
    case RhoSchedule::kHalvingGap: return 0.5 * (1.0 + rho);
    case RhoSchedule::kHarmonic: return 1.0 - 1.0 / static_cast<double>(phase + 1);
  }
  return rho;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::kEpsilonCriterion: return "epsilon-criterion";
    case Termination::kBudgetExhausted: return "budget-exhausted";
    case Termination::kSpaceExhausted: return "space-exhausted";
  }
  return "unknown";
}

void BranchPruneConfig::validate() const {
  lipschitz.validate();
  if (!(gamma >= 0.0)) throw Error(ErrorKind::kInvalidInput, "gamma must be nonnegative");
  if (max_inner_iters == 0 || max_outer_iters == 0 || fallback_attempts == 0) {
    throw Error(ErrorKind::kInvalidInput, "iteration and attempt counters must be >= 1");
  }
  if (!(boundary_slack > 0.0 && boundary_slack <= 1e-3)) {
    throw Error(ErrorKind::kInvalidInput,
                fmt::format("boundary_slack must lie in (0, 1e-3], got {}", boundary_slack));
  }
}

std::optional<double> ray_exit(const SampleHistory& history, const ParamVector& origin,
                               const ParamVector& direction, const LipschitzConfig& cfg,
                               const Box& domain, double slack) {
  if (static_cast<std::size_t>(origin.size()) != history.dimension() ||
      direction.size() != origin.size() || domain.dimension() != history.dimension()) {
    throw Error(ErrorKind::kInvalidInput, "ray_exit: dimension mismatch");
  }
  if (!direction.allFinite() || std::abs(direction.norm() - 1.0) > 1e-9) {
    throw Error(ErrorKind::kInvalidInput, "ray_exit: direction must have unit norm");
  }

  // Inside-interval of each ball along eta -> origin - eta * direction:
  // eta^2 - 2 eta <o - c, u> + |o - c|^2 - r^2 < 0.
  struct Interval {
    double lo;
    double hi;
  };
  std::vector<Interval> intervals;
  if (!history.empty()) {
    const double floor = cfg.rho * history.min_value();
    for (const Sample& s : history.samples()) {
      const double r = (s.value - floor) / cfg.L;
      if (!(r > 0.0)) continue;
      const ParamVector diff = origin - s.point;
      const double b = diff.dot(direction);
      const double c = diff.squaredNorm() - r * r;
      const double disc = b * b - c;
      if (!(disc > 0.0)) continue;
      const double root = std::sqrt(disc);
      const double hi = b + root;
      if (hi <= 0.0) continue;
      intervals.push_back({b - root, hi});
    }
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });

  double eta = 0.0;
  for (const Interval& iv : intervals) {
    if (iv.lo >= eta) break;
    if (iv.hi > eta) eta = iv.hi * (1.0 + slack);
  }

  const double eta_max = domain.max_step(origin, direction);
  if (eta > eta_max) return std::nullopt;

  // The closed-form crossing and the direct envelope test can disagree in the
  // last ulp; push a little further until the direct test agrees.
  if (!history.empty()) {
    double bump = slack;
    for (int k = 0; k < 8 && in_rps(history, domain.clamp(origin - eta * direction), cfg); ++k) {
      bump *= 2.0;
      eta = eta * (1.0 + bump) + bump;
      if (eta > eta_max) return std::nullopt;
    }
  }
  return eta;
}

std::optional<ParamVector> next_sample(const SampleHistory& history,
                                       const ParamVector& grad_at_last,
                                       const BranchPruneConfig& cfg, const Box& domain,
                                       Rng& rng) {
  cfg.validate();
  const ParamVector& origin = history.back().point;
  if (grad_at_last.size() != origin.size()) {
    throw Error(ErrorKind::kInvalidInput, "next_sample: gradient dimension mismatch");
  }

  auto try_direction = [&](const ParamVector& u) -> std::optional<ParamVector> {
    const auto eta = ray_exit(history, origin, u, cfg.lipschitz, domain, cfg.boundary_slack);
    if (!eta) return std::nullopt;
    ParamVector candidate = domain.clamp(origin - *eta * u);
    if (in_rps(history, candidate, cfg.lipschitz)) return std::nullopt;
    return candidate;
  };

  const double gnorm = grad_at_last.norm();
  if (std::isfinite(gnorm) && gnorm > 0.0) {
    if (auto p = try_direction(grad_at_last / gnorm)) return p;
  }
  for (std::size_t k = 0; k < cfg.fallback_attempts; ++k) {
    if (auto p = try_direction(random_unit_vector(history.dimension(), rng))) return p;
  }
  return std::nullopt;
}

GlobalResult optimize_global(const Objective& objective, const Box& domain,
                             const BranchPruneConfig& cfg, Rng& rng,
                             const GlobalOptions& options) {
  cfg.validate();
  if (!objective.value || !objective.gradient) {
    throw Error(ErrorKind::kInvalidInput, "objective needs both value and gradient");
  }
  const std::size_t d = domain.dimension();
  const auto started = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
        .count();
  };

  auto evaluate = [&](const ParamVector& x, std::size_t index) {
    const double v = objective.value(x);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kAssumptionViolation,
                  fmt::format("F1 violated (objective must be finite and nonnegative): "
                              "non-finite value ({}) at sample {}",
                              v, index));
    }
    if (v < 0.0) {
      throw Error(ErrorKind::kAssumptionViolation,
                  fmt::format("F1 violated (objective must be finite and nonnegative): "
                              "negative value ({}) at sample {}",
                              v, index));
    }
    ParamVector g = objective.gradient(x);
    if (static_cast<std::size_t>(g.size()) != d || !g.allFinite()) {
      throw Error(ErrorKind::kAssumptionViolation,
                  fmt::format("F2 violated (objective must be differentiable): gradient is "
                              "not a finite {}-vector at sample {}",
                              d,
                              index));
    }
    return std::pair{v, std::move(g)};
  };

  ParamVector x = options.start ? *options.start : domain.sample(rng);
  if (!domain.contains(x)) throw Error(ErrorKind::kInvalidInput, "start point outside domain");

  SampleHistory history(d);
  RunTrace trace;
  std::vector<PhaseRecord> phases;
  double rho = 0.0;
  std::size_t m = 1;

  {
    auto [v, g] = evaluate(x, 1);
    history.append(x, v, std::move(g));
    trace.rows.push_back({1, m, rho, v, history.min_value(), 0.0,
                          -std::numeric_limits<double>::infinity(), 0.0, true, elapsed_ms()});
  }

  auto finish = [&](Termination why) {
    const Sample& best = history.at(history.min_index());
    return GlobalResult{best.point,        best.value,       std::move(history), rho, why,
                        std::move(phases), std::move(trace)};
  };

  const double eps = cfg.lipschitz.epsilon;
  if (history.min_value() <= eps) {
    phases.push_back({m, rho, 1, 1, false});
    return finish(Termination::kEpsilonCriterion);
  }

  for (std::size_t outer = 0; outer < cfg.max_outer_iters; ++outer) {
    BranchPruneConfig phase_cfg = cfg;
    phase_cfg.lipschitz.rho = rho;
    PhaseRecord phase{m, rho, outer == 0 ? 1 : history.size() + 1, history.size(), false};

    for (std::size_t inner = 0; inner < cfg.max_inner_iters; ++inner) {
      const Sample& last = history.back();
      auto candidate = next_sample(history, *last.gradient, phase_cfg, domain, rng);
      if (!candidate) {
        phase.exhausted = true;
        break;
      }
      const double lhs = lower_envelope(history, *candidate, cfg.lipschitz.L);
      const double rhs = lower_estimator(history, rho);
      const double step = (*candidate - last.point).norm();
      auto [v, g] = evaluate(*candidate, history.size() + 1);
      history.append(std::move(*candidate), v, std::move(g));
      phase.last_index = history.size();
      trace.rows.push_back({history.size(), m, rho, v, history.min_value(), step, lhs, rhs,
                            lhs <= rhs, elapsed_ms()});
      if (history.min_value() <= eps) {
        phases.push_back(phase);
        return finish(Termination::kEpsilonCriterion);
      }
    }

    phases.push_back(phase);
    if (options.on_phase_end) {
      options.on_phase_end(PhaseCheckpoint{history, phase_cfg.lipschitz, phases.back()});
    }
    if (history.min_value() <= eps / (1.0 - rho)) return finish(Termination::kEpsilonCriterion);
    if (outer + 1 == cfg.max_outer_iters) break;

    const double next = escalate_rho(cfg.rho_schedule, rho, m);
    if (!(next < 1.0) || !(next > rho)) return finish(Termination::kSpaceExhausted);
    rho = next;
    ++m;
  }
  return finish(Termination::kBudgetExhausted);
}

double unit_ball_volume(std::size_t d) {
  const double half = 0.5 * static_cast<double>(d);
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

SampleCountBound sample_count_bound(double L, double rho, double f_min, std::size_t d,
                                    double box_volume) {
  if (!(L > 0.0) || !(rho >= 0.0 && rho < 1.0) || d == 0 || !(box_volume > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "sample_count_bound: invalid arguments");
  }
  if (!(f_min > 0.0)) return {std::numeric_limits<double>::infinity(), false};
  const double per_axis = 2.0 * L / ((1.0 - rho) * f_min);
  return {std::pow(per_axis, static_cast<double>(d)) * box_volume / unit_ball_volume(d), true};
}

}  // namespace bpgrad
