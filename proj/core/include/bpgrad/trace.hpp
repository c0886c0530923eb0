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
#include <vector>

namespace bpgrad {

/// One logged iteration. For global optimization `f` is the sample value and
/// `eta` the distance travelled from the previous sample; for training `f` is
/// the mini-batch objective and `eta` the solver's step size.
struct TraceRow {
  std::size_t iter = 0;
  std::size_t phase = 1;
  double rho = 0.0;
  double f = 0.0;
  double running_min = 0.0;
  double eta = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = true;
  double wall_ms = 0.0;

  bool operator==(const TraceRow&) const = default;
};

struct RunTrace {
  std::vector<TraceRow> rows;

  bool operator==(const RunTrace&) const = default;
};

}  // namespace bpgrad
