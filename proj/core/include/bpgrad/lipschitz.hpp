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
#include <optional>
#include <span>
#include <vector>

#include "bpgrad/types.hpp"

namespace bpgrad {

/// One evaluated point. `index` is 1-based and equals the order of evaluation.
struct Sample {
  ParamVector point;
  double value = 0.0;
  std::optional<ParamVector> gradient;
  std::size_t index = 0;
};

/// Append-only record of evaluated samples with a running minimum.
///
/// Values must be finite and nonnegative. The minimum tie-breaks toward the
/// earliest sample so traces are deterministic.
class SampleHistory {
 public:
  explicit SampleHistory(std::size_t dimension);

  const Sample& append(ParamVector point, double value,
                       std::optional<ParamVector> gradient = std::nullopt);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  /// 1-based access by sample index.
  const Sample& at(std::size_t index) const;
  const Sample& back() const;
  std::span<const Sample> samples() const { return samples_; }

  double min_value() const;
  std::size_t min_index() const;

 private:
  std::size_t dimension_;
  std::vector<Sample> samples_;
  double min_value_ = 0.0;
  std::size_t min_index_ = 0;
};

struct LipschitzConfig {
  double L = 1.0;
  /// Scale of the lower-bound estimator, in [0, 1).
  double rho = 0.0;
  double epsilon = 0.0;

  void validate() const;
};

/// Open ball of the removable parameter space around one sample.
struct RpsBall {
  std::size_t center_index = 0;
  double radius = 0.0;
};

/// max_i { f(x_i) - L * |x_i - x| }.
double lower_envelope(const SampleHistory& history, const ParamVector& x, double L);

/// min_i f(x_i).
double upper_bound(const SampleHistory& history);

/// rho * min_i f(x_i).
double lower_estimator(const SampleHistory& history, double rho);

/// (f(x_j) - rho * min_i f(x_i)) / L for the sample x_j.
double ball_radius(const Sample& sample, const SampleHistory& history,
                   const LipschitzConfig& cfg);

std::vector<RpsBall> rps_balls(const SampleHistory& history, const LipschitzConfig& cfg);

/// True iff x lies strictly inside some ball, i.e. the sampling rule
/// lower_envelope(x) <= lower_estimator is violated at x. Evaluated with the
/// same per-term comparison as the envelope so both formulations agree exactly.
bool in_rps(const SampleHistory& history, const ParamVector& x, const LipschitzConfig& cfg);

/// Fraction of probe points inside the removable parameter space.
double coverage_fraction(const SampleHistory& history, const LipschitzConfig& cfg,
                         std::span<const ParamVector> probe_points);

/// Regular grid with `per_axis` points per coordinate, endpoints included.
std::vector<ParamVector> probe_grid(const Box& box, std::size_t per_axis);

}  // namespace bpgrad
