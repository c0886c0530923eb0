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

#include "bpgrad/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "bpgrad/error.hpp"

namespace bpgrad {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid input";
    case ErrorKind::kInvalidState: return "invalid state";
    case ErrorKind::kAssumptionViolation: return "assumption violation";
    case ErrorKind::kNumericFailure: return "numeric failure";
    case ErrorKind::kCertificationFailure: return "certification failure";
    case ErrorKind::kConfig: return "config error";
  }
  return "error";
}

bool all_finite(const ParamVector& x) { return x.allFinite(); }

void require_finite(const ParamVector& x, const char* what) {
  if (!x.allFinite()) {
    throw Error(ErrorKind::kInvalidInput, fmt::format("{} has non-finite coordinates", what));
  }
}

ParamVector random_unit_vector(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ParamVector v(static_cast<Eigen::Index>(dim));
  for (;;) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

Box::Box(ParamVector lower, ParamVector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0 || lower_.size() != upper_.size()) {
    throw Error(ErrorKind::kInvalidInput, "box bounds must be nonempty and of equal dimension");
  }
  if (!lower_.allFinite() || !upper_.allFinite() || (upper_.array() <= lower_.array()).any()) {
    throw Error(ErrorKind::kInvalidInput, "box requires finite bounds with lower < upper");
  }
}

Box Box::uniform(std::size_t dim, double lo, double hi) {
  const auto n = static_cast<Eigen::Index>(dim);
  return Box(ParamVector::Constant(n, lo), ParamVector::Constant(n, hi));
}

bool Box::contains(const ParamVector& x) const {
  return x.size() == lower_.size() && (x.array() >= lower_.array()).all() &&
         (x.array() <= upper_.array()).all();
}

double Box::volume() const { return (upper_ - lower_).prod(); }

ParamVector Box::center() const { return 0.5 * (lower_ + upper_); }

ParamVector Box::clamp(const ParamVector& x) const {
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

ParamVector Box::sample(Rng& rng) const {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ParamVector x(lower_.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = lower_[i] + u(rng) * (upper_[i] - lower_[i]);
  }
  return x;
}

double Box::max_step(const ParamVector& origin, const ParamVector& direction) const {
  double eta = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < origin.size(); ++i) {
    const double u = direction[i];
    if (u > 0.0) {
      eta = std::min(eta, (origin[i] - lower_[i]) / u);
    } else if (u < 0.0) {
      eta = std::min(eta, (origin[i] - upper_[i]) / u);
    }
  }
  return std::max(eta, 0.0);
}

}  // namespace bpgrad
