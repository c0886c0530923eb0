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

#include "bpgrad/lipschitz.hpp"

#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "bpgrad/error.hpp"

namespace bpgrad {
namespace {

void require_nonempty(const SampleHistory& history) {
  if (history.empty()) throw Error(ErrorKind::kInvalidState, "sample history is empty");
}

void require_dimension(const SampleHistory& history, const ParamVector& x) {
  if (static_cast<std::size_t>(x.size()) != history.dimension()) {
    throw Error(ErrorKind::kInvalidInput,
                fmt::format("point has dimension {}, history has {}", x.size(),
                            history.dimension()));
  }
}

// Shared by lower_envelope and in_rps so the two agree bit for bit.
inline double envelope_term(const Sample& s, const ParamVector& x, double L) {
  return s.value - L * (s.point - x).norm();
}

}  // namespace

SampleHistory::SampleHistory(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw Error(ErrorKind::kInvalidInput, "dimension must be positive");
}

const Sample& SampleHistory::append(ParamVector point, double value,
                                    std::optional<ParamVector> gradient) {
  require_dimension(*this, point);
  require_finite(point, "sample point");
  if (!std::isfinite(value) || value < 0.0) {
    throw Error(ErrorKind::kInvalidInput,
                fmt::format("sample value {} must be finite and nonnegative", value));
  }
  if (gradient && static_cast<std::size_t>(gradient->size()) != dimension_) {
    throw Error(ErrorKind::kInvalidInput, "gradient dimension mismatch");
  }
  Sample s{std::move(point), value, std::move(gradient), samples_.size() + 1};
  if (samples_.empty() || value < min_value_) {
    min_value_ = value;
    min_index_ = s.index;
  }
  samples_.push_back(std::move(s));
  return samples_.back();
}

const Sample& SampleHistory::at(std::size_t index) const {
  if (index == 0 || index > samples_.size()) {
    throw Error(ErrorKind::kInvalidInput, fmt::format("sample index {} out of range", index));
  }
  return samples_[index - 1];
}

const Sample& SampleHistory::back() const {
  require_nonempty(*this);
  return samples_.back();
}

double SampleHistory::min_value() const {
  require_nonempty(*this);
  return min_value_;
}

std::size_t SampleHistory::min_index() const {
  require_nonempty(*this);
  return min_index_;
}

void LipschitzConfig::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw Error(ErrorKind::kInvalidInput, fmt::format("L must be positive, got {}", L));
  }
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw Error(ErrorKind::kInvalidInput, fmt::format("rho must lie in [0, 1), got {}", rho));
  }
  if (!(epsilon >= 0.0)) {
    throw Error(ErrorKind::kInvalidInput,
                fmt::format("epsilon must be nonnegative, got {}", epsilon));
  }
}

double lower_envelope(const SampleHistory& history, const ParamVector& x, double L) {
  require_nonempty(history);
  require_dimension(history, x);
  double best = -std::numeric_limits<double>::infinity();
  for (const Sample& s : history.samples()) best = std::max(best, envelope_term(s, x, L));
  return best;
}

double upper_bound(const SampleHistory& history) { return history.min_value(); }

double lower_estimator(const SampleHistory& history, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw Error(ErrorKind::kInvalidInput, fmt::format("rho must lie in [0, 1), got {}", rho));
  }
  return rho * history.min_value();
}

double ball_radius(const Sample& sample, const SampleHistory& history,
                   const LipschitzConfig& cfg) {
  return (sample.value - cfg.rho * history.min_value()) / cfg.L;
}

std::vector<RpsBall> rps_balls(const SampleHistory& history, const LipschitzConfig& cfg) {
  std::vector<RpsBall> balls;
  balls.reserve(history.size());
  for (const Sample& s : history.samples()) {
    balls.push_back({s.index, ball_radius(s, history, cfg)});
  }
  return balls;
}

bool in_rps(const SampleHistory& history, const ParamVector& x, const LipschitzConfig& cfg) {
  require_nonempty(history);
  require_dimension(history, x);
  const double threshold = lower_estimator(history, cfg.rho);
  for (const Sample& s : history.samples()) {
    if (envelope_term(s, x, cfg.L) > threshold) return true;
  }
  return false;
}

double coverage_fraction(const SampleHistory& history, const LipschitzConfig& cfg,
                         std::span<const ParamVector> probe_points) {
  if (probe_points.empty()) throw Error(ErrorKind::kInvalidInput, "no probe points");
  std::size_t inside = 0;
  for (const ParamVector& p : probe_points) inside += in_rps(history, p, cfg) ? 1 : 0;
  return static_cast<double>(inside) / static_cast<double>(probe_points.size());
}

std::vector<ParamVector> probe_grid(const Box& box, std::size_t per_axis) {
  if (per_axis < 2) throw Error(ErrorKind::kInvalidInput, "probe grid needs >= 2 points per axis");
  const std::size_t d = box.dimension();
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= per_axis;
  std::vector<ParamVector> points;
  points.reserve(total);
  std::vector<std::size_t> idx(d, 0);
  const double denom = static_cast<double>(per_axis - 1);
  for (std::size_t n = 0; n < total; ++n) {
    ParamVector p(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const double t = static_cast<double>(idx[i]) / denom;
      p[k] = box.lower()[k] + t * (box.upper()[k] - box.lower()[k]);
    }
    points.push_back(std::move(p));
    for (std::size_t i = 0; i < d; ++i) {
      if (++idx[i] < per_axis) break;
      idx[i] = 0;
    }
  }
  return points;
}

}  // namespace bpgrad
