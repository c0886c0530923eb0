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

// bpgrad: run branch-and-prune global optimization and training experiments.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "bpgrad/error.hpp"
#include "bpgrad/harness.hpp"

namespace {

using bpgrad::ExperimentConfig;
using bpgrad::Mode;

// Flag values in registration order; unset flags stay empty.
struct FlagSet {
  std::vector<std::pair<std::string, std::string>> values;
  std::string config_file;
  std::vector<std::string> extra;  // --set key=value

  void add(CLI::App* app, const std::string& key, const std::string& help) {
    values.emplace_back(key, std::string());
    app->add_option("--" + key, values.back().second, help);
  }

  ExperimentConfig build(Mode mode) const {
    ExperimentConfig cfg = bpgrad::default_config(mode);
    if (!config_file.empty()) bpgrad::apply_config_file(cfg, config_file);
    for (const auto& [k, v] : values) {
      if (!v.empty()) bpgrad::apply_setting(cfg, k, v);
    }
    for (const std::string& kv : extra) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw bpgrad::Error(bpgrad::ErrorKind::kConfig, fmt::format("--set expects key=value, got '{}'", kv));
      }
      bpgrad::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
  }
};

void add_common(CLI::App* app, FlagSet& flags) {
  flags.values.reserve(32);
  app->add_option("--config", flags.config_file, "key = value config file (flags override it)");
  app->add_option("--set", flags.extra, "extra key=value setting (repeatable)");
  flags.add(app, "seed", "RNG seed");
  flags.add(app, "out", "output directory (default: $BPGRAD_OUT/<run-name>)");
  flags.add(app, "L", "Lipschitz constant");
  flags.add(app, "eps", "precision epsilon");
}

void add_train(CLI::App* app, FlagSet& flags) {
  flags.add(app, "dataset", "blobs | idx");
  flags.add(app, "mu", "momentum in [0, 1]");
  flags.add(app, "epochs", "training epochs");
  flags.add(app, "batch", "mini-batch size");
  flags.add(app, "lr", "learning rate (baseline solvers)");
  flags.add(app, "hidden", "hidden layer widths, comma separated");
  flags.add(app, "activation", "relu | tanh");
  flags.add(app, "weight-decay", "l2 regularization coefficient");
  flags.add(app, "phases", "maximum number of rho phases (N)");
}

void print_summary(const bpgrad::RunResult& r) {
  for (const auto& [k, v] : r.summary.entries()) fmt::print("{} = {}\n", k, v);
  if (!r.out_dir.empty()) fmt::print("# wrote {}\n", r.out_dir);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int run_diagnostics(const std::vector<std::string>& dirs, const std::string& out) {
  for (const std::string& dir : dirs) {
    const auto trace = bpgrad::read_trace_csv(dir + "/trace.csv");
    std::size_t per_epoch = trace.rows.size();
    const std::string summary_path = dir + "/summary.txt";
    if (std::filesystem::exists(summary_path)) {
      const auto summary = bpgrad::read_summary(summary_path);
      if (summary.get("iters_per_epoch")) {
        per_epoch = static_cast<std::size_t>(summary.get_double("iters_per_epoch"));
      }
    }
    const auto report = bpgrad::diagnostics(trace, per_epoch);
    const std::string target = out.empty() ? dir : (dirs.size() == 1 ? out : out + "/" +
                                                    std::filesystem::path(dir).filename().string());
    bpgrad::write_diagnostics(target, report, trace);
    fmt::print("{}: iterations = {}, satisfaction_fraction = {}, eta_median first/last epoch = {} / {}\n",
               dir, report.iterations, bpgrad::format_real(report.satisfaction_fraction),
               bpgrad::format_real(report.epochs.front().eta_median),
               bpgrad::format_real(report.epochs.back().eta_median));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branch-and-prune global optimization and adaptive solver experiments"};
  app.require_subcommand(1);

  FlagSet opt_flags;
  CLI::App* optimize = app.add_subcommand("optimize", "global minimization of a benchmark function");
  add_common(optimize, opt_flags);
  opt_flags.add(optimize, "fn", "benchmark: abs1d | shekel1d | quad2d | rastrigin2d");
  opt_flags.add(optimize, "rho-schedule", "harmonic | halving-gap");

  FlagSet train_flags;
  CLI::App* train = app.add_subcommand("train", "train a small MLP with one solver");
  add_common(train, train_flags);
  train_flags.add(train, "solver", "bpgrad | sgd-momentum | adagrad | adadelta | rmsprop | adam");
  add_train(train, train_flags);

  FlagSet cmp_flags;
  std::string solver_list = "bpgrad,sgd-momentum,adagrad,adadelta,rmsprop,adam";
  CLI::App* cmp = app.add_subcommand("compare", "train the same problem with several solvers");
  add_common(cmp, cmp_flags);
  add_train(cmp, cmp_flags);
  cmp->add_option("--solver", solver_list, "comma-separated solver list");

  std::vector<std::string> diag_dirs;
  std::string diag_out;
  CLI::App* diag = app.add_subcommand("diagnostics", "step-size and sampling-rule report for runs");
  diag->add_option("runs", diag_dirs, "run directories containing trace.csv")->required();
  diag->add_option("--out", diag_out, "where to write the report (default: each run directory)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (optimize->parsed()) {
      print_summary(bpgrad::run(opt_flags.build(Mode::kOptimize)));
    } else if (train->parsed()) {
      print_summary(bpgrad::run(train_flags.build(Mode::kTrain)));
    } else if (cmp->parsed()) {
      const ExperimentConfig base = cmp_flags.build(Mode::kTrain);
      std::string root = base.out;
      if (root.empty()) {
        const char* env = std::getenv("BPGRAD_OUT");
        root = fmt::format("{}/compare-{}-seed{}", env && *env ? env : "runs", base.target(), base.seed);
      }
      std::vector<ExperimentConfig> configs;
      for (const std::string& name : split_list(solver_list)) {
        ExperimentConfig c = base;
        bpgrad::apply_setting(c, "solver", name);
        c.out = root + "/" + name;
        configs.push_back(std::move(c));
      }
      const auto rows = bpgrad::compare(configs);
      std::filesystem::create_directories(root);
      bpgrad::write_compare_csv(root + "/compare.csv", rows);
      fmt::print("{:<14} {:>6} {:>16} {:>16} {:>10} {:>10}\n", "solver", "seed", "final_objective",
                 "best_objective", "accuracy", "wall_ms");
      for (const auto& r : rows) {
        fmt::print("{:<14} {:>6} {:>16.6g} {:>16.6g} {:>10.4f} {:>10.1f}\n", r.solver, r.seed,
                   r.final_objective, r.best_objective, r.accuracy, r.wall_ms);
      }
      fmt::print("# wrote {}/compare.csv\n", root);
    } else if (diag->parsed()) {
      return run_diagnostics(diag_dirs, diag_out);
    }
  } catch (const bpgrad::Error& e) {
    std::cerr << "bpgrad: " << bpgrad::to_string(e.kind()) << ": " << e.what() << '\n';
    return e.kind() == bpgrad::ErrorKind::kConfig ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "bpgrad: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
