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


#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "bpgrad/branch_prune.hpp"
#include "bpgrad/lipschitz.hpp"
#include "bpgrad/models.hpp"
#include "bpgrad/solvers.hpp"
#include "bpgrad/testbed.hpp"

namespace {

using namespace bpgrad;

SampleHistory make_history(std::size_t dim, std::size_t n) {
  Rng rng(1);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  std::uniform_real_distribution<double> v(0.1, 1.0);
  SampleHistory h(dim);
  for (std::size_t i = 0; i < n; ++i) {
    ParamVector p(static_cast<Eigen::Index>(dim));
    for (auto& x : p) x = c(rng);
    h.append(p, v(rng));
  }
  return h;
}

void BM_InRps(benchmark::State& state) {
  const auto h = make_history(2, static_cast<std::size_t>(state.range(0)));
  const LipschitzConfig cfg{10.0, 0.5, 0.0};
  const ParamVector x = ParamVector::Constant(2, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(in_rps(h, x, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_InRps)->RangeMultiplier(8)->Range(8, 4096)->Complexity();

void BM_RayExit(benchmark::State& state) {
  const auto h = make_history(2, static_cast<std::size_t>(state.range(0)));
  const LipschitzConfig cfg{10.0, 0.5, 0.0};
  const Box box = Box::uniform(2, -2, 2);
  const ParamVector origin = h.back().point;
  const ParamVector u = ParamVector{{0.6, 0.8}};
  for (auto _ : state) benchmark::DoNotOptimize(ray_exit(h, origin, u, cfg, box));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RayExit)->RangeMultiplier(8)->Range(8, 4096)->Complexity();

void BM_OptimizeShekel(benchmark::State& state) {
  const BenchmarkFn& fn = find_benchmark("shekel1d");
  BranchPruneConfig cfg;
  cfg.lipschitz = {fn.declared_L, 0.0, 0.01};
  for (auto _ : state) {
    Rng rng(7);
    benchmark::DoNotOptimize(optimize_global(fn.objective(), fn.domain, cfg, rng).minimum);
  }
}
BENCHMARK(BM_OptimizeShekel);

void BM_MlpValueAndGradient(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  const MlpSpec spec{{2, hidden, 2}, Activation::kRelu, 5e-4};
  const Dataset data = make_blobs(2, 5, 2, 0.9, 1);
  const ParamVector p = init_params(spec, 1);
  for (auto _ : state) benchmark::DoNotOptimize(value_and_gradient(spec, p, data).first);
}
BENCHMARK(BM_MlpValueAndGradient)->Arg(16)->Arg(64)->Arg(256);

void BM_SolverStep(benchmark::State& state) {
  SolverConfig cfg;
  cfg.kind = static_cast<SolverKind>(state.range(0));
  const std::size_t dim = 1000;
  Solver solver(cfg, dim, 1);
  ParamVector x = ParamVector::Ones(static_cast<Eigen::Index>(dim));
  const ParamVector g = ParamVector::LinSpaced(static_cast<Eigen::Index>(dim), -1.0, 1.0);
  for (auto _ : state) {
    x = solver.step(x, 1.0, g).next;
    benchmark::DoNotOptimize(x.data());
  }
  state.SetLabel(std::string(to_string(cfg.kind)));
}
BENCHMARK(BM_SolverStep)->DenseRange(0, 5);

}  // namespace

BENCHMARK_MAIN();
