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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bpgrad/branch_prune.hpp"
#include "bpgrad/models.hpp"
#include "bpgrad/solvers.hpp"

namespace bpgrad {

enum class Mode { kOptimize, kTrain };

std::string_view to_string(Mode m);

/// Everything needed to reproduce one run.
struct ExperimentConfig {
  Mode mode = Mode::kTrain;

  // optimize
  std::string fn = "abs1d";
  BranchPruneConfig branch;
  bool L_set = false;

  // train
  std::string dataset = "blobs";
  std::size_t blob_classes = 2;
  std::size_t blob_per_class = 100;
  std::size_t blob_dim = 2;
  double blob_spread = 0.9;
  std::string idx_images;
  std::string idx_labels;
  std::size_t idx_limit = 0;
  std::vector<std::size_t> hidden = {16};
  Activation activation = Activation::kRelu;
  double weight_decay = 5e-4;
  SolverConfig solver;
  bool learning_rate_set = false;
  std::size_t epochs = 20;
  std::size_t batch = 10;

  std::uint64_t seed = 0;
  std::string out;

  /// Benchmark name or dataset spec.
  std::string target() const;
  void validate() const;
};

ExperimentConfig default_config(Mode mode);

/// Applies one setting. Keys match the long CLI flag names without dashes
/// (`L`, `mu`, `eps`, `rho-schedule`, ...). Throws kConfig on unknown keys or
/// unparsable values.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Applies every `key = value` line of a config file.
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

}  // namespace bpgrad
