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

#include "bpgrad/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>

#include <fmt/core.h>

#include "bpgrad/error.hpp"
#include "bpgrad/idx.hpp"
#include "bpgrad/svg.hpp"
#include "bpgrad/testbed.hpp"

namespace bpgrad {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string join(const ParamVector& x) {
  std::string out;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i > 0) out += ' ';
    out += format_real(x[i]);
  }
  return out;
}

std::vector<double> column(const RunTrace& t, double TraceRow::*field) {
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (const TraceRow& r : t.rows) out.push_back(r.*field);
  return out;
}

std::vector<double> iterations(const RunTrace& t) {
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (const TraceRow& r : t.rows) out.push_back(static_cast<double>(r.iter));
  return out;
}

double column_min(const RunTrace& t) {
  double m = std::numeric_limits<double>::infinity();
  for (const TraceRow& r : t.rows) m = std::min(m, r.f);
  return m;
}

void write_run_plots(const std::string& dir, const RunTrace& trace, Mode mode) {
  const auto it = iterations(trace);
  write_svg(dir + "/objective.svg",
            {mode == Mode::kTrain ? "Mini-batch objective" : "Sample values", "iteration",
             "f",
             {{"f", it, column(trace, &TraceRow::f), "#1f77b4"},
              {"running min", it, column(trace, &TraceRow::running_min), "#d62728"}},
             true});
  write_svg(dir + "/eta.svg", {mode == Mode::kTrain ? "Step size" : "Distance between samples",
                               "iteration",
                               "eta",
                               {{"eta", it, column(trace, &TraceRow::eta), "#2ca02c"}},
                               true});
}

Dataset load_dataset(const ExperimentConfig& cfg) {
  if (cfg.dataset == "idx") return load_idx_dataset(cfg.idx_images, cfg.idx_labels, 10, cfg.idx_limit);
  return make_blobs(cfg.blob_classes, cfg.blob_per_class, cfg.blob_dim, cfg.blob_spread, cfg.seed);
}

RunResult run_optimize(const ExperimentConfig& cfg) {
  const BenchmarkFn& fn = find_benchmark(cfg.fn);
  BranchPruneConfig bp = cfg.branch;
  if (!cfg.L_set) bp.lipschitz.L = fn.declared_L;
  Rng rng(cfg.seed);
  const auto started = Clock::now();
  GlobalResult res = optimize_global(fn.objective(), fn.domain, bp, rng);
  const double wall = ms_since(started);

  Summary s;
  s.set("mode", "optimize");
  s.set("fn", fn.name);
  s.set("seed", std::to_string(cfg.seed));
  s.set("L", bp.lipschitz.L);
  s.set("eps", bp.lipschitz.epsilon);
  s.set("rho_schedule", std::string(to_string(bp.rho_schedule)));
  s.set("minimum", res.minimum);
  s.set("minimizer", join(res.minimizer));
  s.set("min_f", column_min(res.trace));
  s.set("samples", std::to_string(res.history.size()));
  s.set("phases", std::to_string(res.phases.size()));
  s.set("rho_final", res.rho_final);
  s.set("terminated_by", std::string(to_string(res.terminated_by)));
  s.set("wall_ms", wall);
  return {std::move(res.trace), std::move(s), {}, res.minimizer};
}

RunResult run_train(const ExperimentConfig& cfg) {
  const Dataset data = load_dataset(cfg);
  MlpSpec spec;
  spec.layer_widths.push_back(static_cast<std::size_t>(data.features.cols()));
  for (std::size_t w : cfg.hidden) spec.layer_widths.push_back(w);
  spec.layer_widths.push_back(static_cast<std::size_t>(data.class_count));
  spec.activation = cfg.activation;
  spec.weight_decay = cfg.weight_decay;

  ParamVector params = init_params(spec, cfg.seed);
  const BatchStream stream(data, cfg.batch, cfg.seed);
  const std::size_t per_epoch = stream.batches_per_epoch();

  SolverConfig sc = cfg.solver;
  const std::size_t total = per_epoch * cfg.epochs;
  sc.evals_per_phase = (total + sc.max_phases - 1) / sc.max_phases;
  if (sc.kind == SolverKind::kAdadelta && !cfg.learning_rate_set) sc.learning_rate = 1.0;
  Solver solver(sc, static_cast<std::size_t>(params.size()), cfg.seed);
  ConditionWindow window(sc.condition_window);

  RunTrace trace;
  trace.rows.reserve(total);
  double best = std::numeric_limits<double>::infinity();
  std::size_t iter = 0;
  bool stop = false;
  const auto started = Clock::now();
  for (std::size_t epoch = 0; epoch < cfg.epochs && !stop; ++epoch) {
    for (const MiniBatch& batch : stream.epoch(epoch)) {
      auto [f, g] = value_and_gradient(spec, params, batch);
      const double rho = solver.state().rho;
      const std::size_t phase = solver.state().phase;
      StepResult step;
      try {
        step = solver.step(params, f, g);
      } catch (const Error& e) {
        throw Error(e.kind(), fmt::format("epoch {}: {}", epoch + 1, e.what()));
      }
      ++iter;
      window.push(params, f);
      const ConditionRecord rec = check_condition(window.samples(), step.next, rho, sc.L, iter);
      trace.rows.push_back({iter, phase, rho, f, solver.state().running_min, step.eta, rec.lhs,
                            rec.rhs, rec.satisfied, ms_since(started)});
      params = std::move(step.next);
      if (step.converged || step.phases_exhausted) {
        stop = true;
        break;
      }
    }
    best = std::min(best, objective(spec, params, data));
  }
  const double wall = ms_since(started);
  const double final_objective = objective(spec, params, data);
  best = std::min(best, final_objective);

  Summary s;
  s.set("mode", "train");
  s.set("target", cfg.target());
  s.set("solver", std::string(to_string(sc.kind)));
  s.set("seed", std::to_string(cfg.seed));
  s.set("L", sc.L);
  s.set("mu", sc.mu);
  s.set("lr", sc.learning_rate);
  s.set("epochs", std::to_string(cfg.epochs));
  s.set("batch", std::to_string(cfg.batch));
  s.set("iters_per_epoch", std::to_string(per_epoch));
  s.set("iterations", std::to_string(iter));
  s.set("final_objective", final_objective);
  s.set("best_objective", best);
  s.set("train_accuracy", accuracy(spec, params, data));
  s.set("min_f", column_min(trace));
  s.set("final_rho", solver.state().rho);
  s.set("wall_ms", wall);
  return {std::move(trace), std::move(s), {}, std::move(params)};
}

}  // namespace

std::string resolve_out_dir(const ExperimentConfig& cfg) {
  if (!cfg.out.empty()) return cfg.out;
  const char* env = std::getenv("BPGRAD_OUT");
  const std::string root = env && *env ? env : "runs";
  const std::string solver = cfg.mode == Mode::kOptimize
                                 ? "branch-prune"
                                 : std::string(to_string(cfg.solver.kind));
  return fmt::format("{}/{}-{}-{}-seed{}", root, to_string(cfg.mode), cfg.target(), solver,
                     cfg.seed);
}

RunResult run(const ExperimentConfig& cfg, bool write_files) {
  cfg.validate();
  RunResult res = cfg.mode == Mode::kOptimize ? run_optimize(cfg) : run_train(cfg);
  if (write_files) {
    res.out_dir = resolve_out_dir(cfg);
    fs::create_directories(res.out_dir);
    write_trace_csv(res.out_dir + "/trace.csv", res.trace);
    write_summary(res.out_dir + "/summary.txt", res.summary);
    write_run_plots(res.out_dir, res.trace, cfg.mode);
  }
  return res;
}

std::vector<CompareRow> compare(const std::vector<ExperimentConfig>& configs, bool write_files) {
  if (configs.empty()) throw Error(ErrorKind::kInvalidInput, "compare needs at least one config");
  for (const ExperimentConfig& c : configs) {
    if (c.mode != configs.front().mode || c.target() != configs.front().target() ||
        c.seed != configs.front().seed) {
      throw Error(ErrorKind::kInvalidInput, "compared runs must share mode, target and seed");
    }
  }
  std::vector<std::future<RunResult>> pending;
  pending.reserve(configs.size());
  for (const ExperimentConfig& c : configs) {
    pending.push_back(std::async(std::launch::async, [&c, write_files] { return run(c, write_files); }));
  }
  std::vector<CompareRow> rows;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const RunResult r = pending[i].get();
    CompareRow row;
    row.seed = configs[i].seed;
    row.wall_ms = r.summary.get_double("wall_ms");
    if (configs[i].mode == Mode::kTrain) {
      row.solver = std::string(to_string(configs[i].solver.kind));
      row.final_objective = r.summary.get_double("final_objective");
      row.best_objective = r.summary.get_double("best_objective");
      row.accuracy = r.summary.get_double("train_accuracy");
    } else {
      row.solver = "branch-prune";
      row.final_objective = row.best_objective = r.summary.get_double("minimum");
      row.accuracy = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const CompareRow& a, const CompareRow& b) {
    return a.final_objective < b.final_objective;
  });
  return rows;
}

void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kInvalidInput, fmt::format("cannot write {}", path));
  out << "solver,seed,final_objective,best_objective,accuracy,wall_ms\n";
  for (const CompareRow& r : rows) {
    out << r.solver << ',' << r.seed << ',' << format_real(r.final_objective) << ','
        << format_real(r.best_objective) << ',' << format_real(r.accuracy) << ','
        << format_real(r.wall_ms) << '\n';
  }
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::kInvalidInput, "median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

DiagnosticsReport diagnostics(const RunTrace& trace, std::size_t iters_per_epoch) {
  if (trace.rows.empty()) throw Error(ErrorKind::kInvalidInput, "diagnostics: empty trace");
  if (iters_per_epoch == 0) throw Error(ErrorKind::kInvalidInput, "iters_per_epoch must be >= 1");
  DiagnosticsReport rep;
  rep.iterations = trace.rows.size();
  std::size_t satisfied = 0;
  for (std::size_t start = 0; start < trace.rows.size(); start += iters_per_epoch) {
    const std::size_t stop = std::min(trace.rows.size(), start + iters_per_epoch);
    EpochStats e;
    e.epoch = start / iters_per_epoch + 1;
    e.iterations = stop - start;
    std::vector<double> etas;
    double sum = 0.0;
    std::size_t ok = 0;
    e.f_min = std::numeric_limits<double>::infinity();
    e.f_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = start; i < stop; ++i) {
      const TraceRow& r = trace.rows[i];
      etas.push_back(r.eta);
      sum += r.f;
      e.f_min = std::min(e.f_min, r.f);
      e.f_max = std::max(e.f_max, r.f);
      ok += r.satisfied ? 1 : 0;
    }
    e.eta_median = median(std::move(etas));
    e.f_mean = sum / static_cast<double>(e.iterations);
    e.satisfied_fraction = static_cast<double>(ok) / static_cast<double>(e.iterations);
    satisfied += ok;
    rep.epochs.push_back(e);
  }
  rep.satisfaction_fraction = static_cast<double>(satisfied) / static_cast<double>(rep.iterations);
  return rep;
}

void write_diagnostics(const std::string& dir, const DiagnosticsReport& report,
                       const RunTrace& trace) {
  fs::create_directories(dir);
  Summary s;
  s.set("iterations", std::to_string(report.iterations));
  s.set("epochs", std::to_string(report.epochs.size()));
  s.set("satisfaction_fraction", report.satisfaction_fraction);
  for (const EpochStats& e : report.epochs) {
    const std::string p = fmt::format("epoch.{}.", e.epoch);
    s.set(p + "eta_median", e.eta_median);
    s.set(p + "f_mean", e.f_mean);
    s.set(p + "f_min", e.f_min);
    s.set(p + "f_max", e.f_max);
    s.set(p + "satisfied_fraction", e.satisfied_fraction);
  }
  write_summary(dir + "/diagnostics.txt", s);

  const auto it = iterations(trace);
  std::vector<double> ex, eta_med, f_mean;
  for (const EpochStats& e : report.epochs) {
    ex.push_back(static_cast<double>(e.epoch));
    eta_med.push_back(e.eta_median);
    f_mean.push_back(e.f_mean);
  }
  write_svg(dir + "/eta.svg",
            {"Step size per iteration", "iteration", "eta",
             {{"eta", it, column(trace, &TraceRow::eta), "#2ca02c"}}, true});
  write_svg(dir + "/eta_median.svg",
            {"Median step size per epoch", "epoch", "median eta",
             {{"median eta", ex, eta_med, "#2ca02c"}}, true});
  write_svg(dir + "/condition.svg",
            {fmt::format("Sampling rule: LHS vs RHS (satisfied {:.3f})", report.satisfaction_fraction),
             "iteration", "value",
             {{"LHS", it, column(trace, &TraceRow::lhs), "#d62728"},
              {"RHS", it, column(trace, &TraceRow::rhs), "#1f77b4"}},
             false});
  write_svg(dir + "/objective.svg",
            {"Mean objective per epoch", "epoch", "f", {{"mean f", ex, f_mean, "#1f77b4"}}, true});
}

}  // namespace bpgrad
