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
#include <random>

#include <Eigen/Core>

namespace bpgrad {

/// A point in parameter space. Dimension is fixed per problem instance.
using ParamVector = Eigen::VectorXd;

/// All randomness in the library flows through this engine so runs are
/// reproducible from a single seed.
using Rng = std::mt19937_64;

bool all_finite(const ParamVector& x);

/// Throws kInvalidInput unless every coordinate of `x` is finite.
void require_finite(const ParamVector& x, const char* what);

/// Uniformly distributed direction on the unit sphere in R^dim.
ParamVector random_unit_vector(std::size_t dim, Rng& rng);

/// Axis-aligned box domain.
class Box {
 public:
  Box(ParamVector lower, ParamVector upper);

  /// Same interval [lo, hi] on every axis.
  static Box uniform(std::size_t dim, double lo, double hi);

  std::size_t dimension() const { return static_cast<std::size_t>(lower_.size()); }
  const ParamVector& lower() const { return lower_; }
  const ParamVector& upper() const { return upper_; }

  bool contains(const ParamVector& x) const;
  double volume() const;
  ParamVector center() const;
  ParamVector clamp(const ParamVector& x) const;
  ParamVector sample(Rng& rng) const;

  /// Largest eta >= 0 with origin - eta * direction inside the box.
  /// `origin` must lie in the box.
  double max_step(const ParamVector& origin, const ParamVector& direction) const;

 private:
  ParamVector lower_;
  ParamVector upper_;
};

}  // namespace bpgrad
