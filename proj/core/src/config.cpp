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

#include "bpgrad/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "bpgrad/error.hpp"
#include "bpgrad/testbed.hpp"
#include "bpgrad/trace_io.hpp"

namespace bpgrad {
namespace {

double to_real(std::string_view key, std::string_view value) {
  const std::string s(value);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') {
    throw Error(ErrorKind::kConfig, fmt::format("{}: '{}' is not a number", key, value));
  }
  return v;
}

std::uint64_t to_uint(std::string_view key, std::string_view value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorKind::kConfig,
                fmt::format("{}: '{}' is not a nonnegative integer", key, value));
  }
  return v;
}

std::vector<std::size_t> to_widths(std::string_view key, std::string_view value) {
  std::vector<std::size_t> out;
  std::stringstream ss{std::string(value)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(static_cast<std::size_t>(to_uint(key, item)));
  }
  return out;
}

// Re-throws library parse errors as config errors.
template <typename F>
auto as_config(std::string_view key, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, fmt::format("{}: {}", key, e.what()));
  }
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::kOptimize ? "optimize" : "train"; }

std::string ExperimentConfig::target() const {
  if (mode == Mode::kOptimize) return fn;
  if (dataset == "blobs") {
    return fmt::format("blobs-c{}-n{}-d{}-s{}", blob_classes, blob_per_class, blob_dim,
                       format_real(blob_spread));
  }
  return dataset;
}

void ExperimentConfig::validate() const {
  try {
    if (mode == Mode::kOptimize) {
      find_benchmark(fn);
      branch.validate();
    } else {
      if (dataset != "blobs" && dataset != "idx") {
        throw Error(ErrorKind::kConfig, fmt::format("unknown dataset '{}'", dataset));
      }
      if (dataset == "idx" && (idx_images.empty() || idx_labels.empty())) {
        throw Error(ErrorKind::kConfig, "dataset idx needs idx-images and idx-labels");
      }
      if (epochs == 0 || batch == 0) throw Error(ErrorKind::kConfig, "epochs and batch must be >= 1");
      if (!(weight_decay >= 0.0)) throw Error(ErrorKind::kConfig, "weight-decay must be >= 0");
      solver.validate();
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw;
    throw Error(ErrorKind::kConfig, e.what());
  }
}

ExperimentConfig default_config(Mode mode) {
  ExperimentConfig cfg;
  cfg.mode = mode;
  cfg.branch.lipschitz.epsilon = 0.01;
  cfg.solver.L = 20.0;
  return cfg;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "mode") {
    if (value == "optimize") cfg.mode = Mode::kOptimize;
    else if (value == "train") cfg.mode = Mode::kTrain;
    else throw Error(ErrorKind::kConfig, fmt::format("unknown mode '{}'", value));
  } else if (key == "fn") {
    cfg.fn = std::string(value);
  } else if (key == "dataset") {
    cfg.dataset = std::string(value);
  } else if (key == "solver") {
    cfg.solver.kind = as_config(key, [&] { return parse_solver_kind(value); });
  } else if (key == "L") {
    const double L = to_real(key, value);
    cfg.solver.L = L;
    cfg.branch.lipschitz.L = L;
    cfg.L_set = true;
  } else if (key == "mu") {
    cfg.solver.mu = to_real(key, value);
  } else if (key == "rho-schedule") {
    cfg.branch.rho_schedule = as_config(key, [&] { return parse_rho_schedule(value); });
  } else if (key == "eps") {
    const double eps = to_real(key, value);
    cfg.branch.lipschitz.epsilon = eps;
    cfg.solver.epsilon = eps;
  } else if (key == "epochs") {
    cfg.epochs = to_uint(key, value);
  } else if (key == "batch") {
    cfg.batch = to_uint(key, value);
  } else if (key == "seed") {
    cfg.seed = to_uint(key, value);
  } else if (key == "out") {
    cfg.out = std::string(value);
  } else if (key == "lr") {
    cfg.solver.learning_rate = to_real(key, value);
    cfg.learning_rate_set = true;
  } else if (key == "phases") {
    cfg.solver.max_phases = to_uint(key, value);
  } else if (key == "window") {
    cfg.solver.condition_window = to_uint(key, value);
  } else if (key == "hidden") {
    cfg.hidden = to_widths(key, value);
  } else if (key == "activation") {
    cfg.activation = as_config(key, [&] { return parse_activation(value); });
  } else if (key == "weight-decay") {
    cfg.weight_decay = to_real(key, value);
  } else if (key == "blob-classes") {
    cfg.blob_classes = to_uint(key, value);
  } else if (key == "blob-per-class") {
    cfg.blob_per_class = to_uint(key, value);
  } else if (key == "blob-dim") {
    cfg.blob_dim = to_uint(key, value);
  } else if (key == "blob-spread") {
    cfg.blob_spread = to_real(key, value);
  } else if (key == "idx-images") {
    cfg.idx_images = std::string(value);
  } else if (key == "idx-labels") {
    cfg.idx_labels = std::string(value);
  } else if (key == "idx-limit") {
    cfg.idx_limit = to_uint(key, value);
  } else if (key == "max-inner") {
    cfg.branch.max_inner_iters = to_uint(key, value);
  } else if (key == "max-outer") {
    cfg.branch.max_outer_iters = to_uint(key, value);
  } else if (key == "fallback-attempts") {
    cfg.branch.fallback_attempts = to_uint(key, value);
  } else if (key == "gamma") {
    cfg.branch.gamma = to_real(key, value);
  } else {
    throw Error(ErrorKind::kConfig, fmt::format("unknown setting '{}'", key));
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, fmt::format("cannot open config file {}", path));
  for (const auto& [k, v] : parse_key_values(in)) apply_setting(cfg, k, v);
}

}  // namespace bpgrad
