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
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bpgrad/branch_prune.hpp"
#include "bpgrad/models.hpp"
#include "bpgrad/types.hpp"

namespace bpgrad {

/// Nonnegative test objective on a box with a declared Lipschitz constant.
struct BenchmarkFn {
  std::string name;
  Box domain;
  double declared_L = 1.0;
  std::function<double(const ParamVector&)> evaluate;
  std::function<ParamVector(const ParamVector&)> gradient;

  std::size_t dimension() const { return domain.dimension(); }
  Objective objective() const { return {evaluate, gradient}; }
};

/// abs1d, shekel1d, quad2d, rastrigin2d.
const std::vector<BenchmarkFn>& registry();

/// Throws kInvalidInput for unknown names.
const BenchmarkFn& find_benchmark(std::string_view name);

/// Largest |f(a) - f(b)| / |a - b| over `pairs` uniform random pairs in the
/// domain. Throws kCertificationFailure if it exceeds `fn.declared_L` by more
/// than a relative 1e-9 of floating-point roundoff.
double certify_L(const BenchmarkFn& fn, std::size_t pairs, Rng& rng);

/// Gaussian clusters, one per class, centered on a circle of radius 2 in the
/// first two coordinates (on a line when d_in == 1).
Dataset make_blobs(std::size_t classes, std::size_t per_class, std::size_t d_in,
                   double spread, std::uint64_t seed);

/// Deterministic shuffled mini-batches. Each epoch is a fresh permutation
/// derived from (seed, epoch); the last batch of an epoch may be short.
class BatchStream {
 public:
  BatchStream(const Dataset& data, std::size_t batch_size, std::uint64_t seed);

  std::size_t batches_per_epoch() const;
  std::vector<std::size_t> epoch_order(std::size_t epoch) const;
  std::vector<MiniBatch> epoch(std::size_t epoch) const;

 private:
  const Dataset* data_;
  std::size_t batch_size_;
  std::uint64_t seed_;
};

MiniBatch gather(const Dataset& data, std::span<const std::size_t> rows);

}  // namespace bpgrad
