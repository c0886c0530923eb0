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
#include <string>
#include <vector>

#include "bpgrad/config.hpp"
#include "bpgrad/trace.hpp"
#include "bpgrad/trace_io.hpp"

namespace bpgrad {

struct RunResult {
  RunTrace trace;
  Summary summary;
  std::string out_dir;
  /// Final model parameters (train) or minimizer (optimize).
  ParamVector params;
};

/// Output directory: `cfg.out` if set, else `$BPGRAD_OUT` (default `runs`)
/// joined with `<mode>-<target>-<solver>-seed<seed>`.
std::string resolve_out_dir(const ExperimentConfig& cfg);

/// Runs one experiment. With `write_files`, writes trace.csv, summary.txt and
/// SVG plots into the output directory.
RunResult run(const ExperimentConfig& cfg, bool write_files = true);

struct CompareRow {
  std::string solver;
  std::uint64_t seed = 0;
  double final_objective = 0.0;
  double best_objective = 0.0;
  double accuracy = 0.0;
  double wall_ms = 0.0;
};

/// Runs each config (concurrently) and returns one row per run sorted by
/// final objective. All configs must share target and seed.
std::vector<CompareRow> compare(const std::vector<ExperimentConfig>& configs,
                                bool write_files = true);

void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows);

struct EpochStats {
  std::size_t epoch = 0;
  std::size_t iterations = 0;
  double eta_median = 0.0;
  double f_mean = 0.0;
  double f_min = 0.0;
  double f_max = 0.0;
  double satisfied_fraction = 0.0;
};

struct DiagnosticsReport {
  std::vector<EpochStats> epochs;
  double satisfaction_fraction = 0.0;
  std::size_t iterations = 0;
};

/// Per-epoch step-size and objective summaries plus the overall fraction of
/// iterations that satisfied the sampling rule.
DiagnosticsReport diagnostics(const RunTrace& trace, std::size_t iters_per_epoch);

/// Writes diagnostics.txt and eta.svg / condition.svg / objective.svg.
void write_diagnostics(const std::string& dir, const DiagnosticsReport& report,
                       const RunTrace& trace);

double median(std::vector<double> values);

}  // namespace bpgrad
