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


#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "bpgrad/error.hpp"
#include "bpgrad/lipschitz.hpp"
#include "bpgrad/testbed.hpp"
#include "oracles.hpp"

namespace bpgrad {
namespace {

ParamVector v1(double x) { return ParamVector::Constant(1, x); }

SampleHistory history_1d(std::initializer_list<std::pair<double, double>> pts) {
  SampleHistory h(1);
  for (auto [x, f] : pts) h.append(v1(x), f);
  return h;
}

SampleHistory random_history(std::size_t dim, std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_real_distribution<double> val(0.0, 3.0);
  SampleHistory h(dim);
  for (std::size_t i = 0; i < n; ++i) {
    ParamVector p(static_cast<Eigen::Index>(dim));
    for (auto& c : p) c = coord(rng);
    h.append(p, val(rng));
  }
  return h;
}

TEST(LowerEnvelope, ZeroDistance) {
  EXPECT_DOUBLE_EQ(lower_envelope(history_1d({{0, 5}}), v1(0), 10), 5.0);
}

TEST(LowerEnvelope, SingleTerm) {
  EXPECT_NEAR(lower_envelope(history_1d({{0, 5}}), v1(0.3), 10), 2.0, 1e-12);
}

TEST(LowerEnvelope, TwoTermsMatchBruteForce) {
  const auto h = history_1d({{0, 5}, {1, 3}});
  const double expected = std::max(5.0 - 10.0 * 0.5, 3.0 - 10.0 * 0.5);
  EXPECT_DOUBLE_EQ(expected, 0.0);
  EXPECT_DOUBLE_EQ(lower_envelope(h, v1(0.5), 10), expected);
}

TEST(LowerEnvelope, DimensionMismatchThrows) {
  const auto h = history_1d({{0, 5}});
  try {
    lower_envelope(h, ParamVector::Zero(2), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidInput);
  }
}

TEST(UpperBound, Examples) {
  EXPECT_DOUBLE_EQ(upper_bound(history_1d({{0, 5}, {1, 3}})), 3.0);
  EXPECT_DOUBLE_EQ(upper_bound(history_1d({{0, 5}})), 5.0);
}

TEST(UpperBound, EmptyHistoryThrows) {
  SampleHistory h(1);
  try {
    upper_bound(h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidState);
  }
}

TEST(UpperBound, ShekelRunMatchesIndependentMin) {
  const BenchmarkFn& fn = find_benchmark("shekel1d");
  BranchPruneConfig cfg;
  cfg.lipschitz.L = fn.declared_L;
  cfg.lipschitz.epsilon = 0.0;
  cfg.max_outer_iters = 1000;
  cfg.max_inner_iters = 200;
  Rng rng(3);
  // Collect a 200-sample history by stopping after the first inner loop.
  cfg.max_outer_iters = 1;
  const GlobalResult r = optimize_global(fn.objective(), fn.domain, cfg, rng);
  double m = std::numeric_limits<double>::infinity();
  for (const Sample& s : r.history.samples()) m = std::min(m, s.value);
  EXPECT_EQ(upper_bound(r.history), m);
}

TEST(SampleHistory, EarliestMinimumWins) {
  const auto h = history_1d({{0, 4}, {1, 2}, {2, 2}, {3, 7}});
  EXPECT_EQ(h.min_index(), 2u);
  EXPECT_EQ(h.at(3).index, 3u);
}

TEST(SampleHistory, RejectsNegativeAndNonFinite) {
  SampleHistory h(1);
  EXPECT_THROW(h.append(v1(0), -1.0), Error);
  EXPECT_THROW(h.append(v1(0), std::numeric_limits<double>::quiet_NaN()), Error);
  EXPECT_THROW(h.append(v1(std::numeric_limits<double>::infinity()), 1.0), Error);
  EXPECT_THROW(h.append(ParamVector::Zero(2), 1.0), Error);
  EXPECT_TRUE(h.empty());
}

TEST(LowerEstimator, Examples) {
  const auto h = history_1d({{0, 4}});
  EXPECT_DOUBLE_EQ(lower_estimator(h, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(lower_estimator(h, 0.5), 2.0);
  EXPECT_NEAR(lower_estimator(h, 0.99), 3.96, 1e-12);
}

TEST(LowerEstimator, RhoOutOfRangeThrows) {
  const auto h = history_1d({{0, 4}});
  for (double rho : {-0.1, 1.0, 1.5}) {
    try {
      lower_estimator(h, rho);
      FAIL() << rho;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kInvalidInput);
    }
  }
}

TEST(BallRadius, DirectFormula) {
  const auto h = history_1d({{0, 4}, {1, 6}});
  LipschitzConfig cfg{10.0, 0.5, 0.0};
  EXPECT_NEAR(ball_radius(h.at(2), h, cfg), 0.4, 1e-15);
}

TEST(BallRadius, ShrinksAsRhoApproachesOne) {
  const auto h = history_1d({{0, 4}});
  LipschitzConfig cfg{10.0, 0.999, 0.0};
  EXPECT_NEAR(ball_radius(h.at(1), h, cfg), 0.0004, 1e-15);
}

TEST(BallRadius, RecordedRunMatchesRecomputation) {
  const BenchmarkFn& fn = find_benchmark("shekel1d");
  BranchPruneConfig cfg;
  cfg.lipschitz.L = fn.declared_L;
  cfg.lipschitz.epsilon = 0.01;
  Rng rng(11);
  const GlobalResult r = optimize_global(fn.objective(), fn.domain, cfg, rng);
  LipschitzConfig lc = cfg.lipschitz;
  lc.rho = r.rho_final;
  const double m = oracle::history_min(r.history);
  const auto balls = rps_balls(r.history, lc);
  ASSERT_EQ(balls.size(), r.history.size());
  for (const RpsBall& b : balls) {
    const double expected = (r.history.at(b.center_index).value - lc.rho * m) / lc.L;
    EXPECT_EQ(b.radius, expected);
    EXPECT_GE(b.radius, (1.0 - lc.rho) * m / lc.L - 1e-15);
  }
}

TEST(InRps, CenterOfPositiveBall) {
  const auto h = history_1d({{0, 4}, {1, 6}});
  EXPECT_TRUE(in_rps(h, v1(1.0), LipschitzConfig{10, 0.5, 0}));
}

TEST(InRps, OutsideAllBalls) {
  const auto h = history_1d({{0, 4}, {1, 6}});
  const LipschitzConfig cfg{10, 0.5, 0};
  // radii 0.2 and 0.4; 0.6 is on the surface of the second ball (open balls).
  EXPECT_FALSE(in_rps(h, v1(0.6), cfg));
  EXPECT_FALSE(in_rps(h, v1(-0.25), cfg));
}

TEST(InRps, AgreesWithBallLoopAndEnvelope) {
  Rng rng(42);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  std::uniform_real_distribution<double> rho_d(0.0, 0.99);
  std::size_t pairs = 0;
  for (std::size_t trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 1 + trial % 3;
    const SampleHistory h = random_history(dim, 1 + trial % 7, rng);
    const LipschitzConfig cfg{2.0 + static_cast<double>(trial % 5), rho_d(rng), 0.0};
    for (int k = 0; k < 20; ++k, ++pairs) {
      ParamVector x(static_cast<Eigen::Index>(dim));
      for (auto& c : x) c = coord(rng);
      const bool a = in_rps(h, x, cfg);
      EXPECT_EQ(a, lower_envelope(h, x, cfg.L) > lower_estimator(h, cfg.rho));
      EXPECT_EQ(a, oracle::ball_loop_in_rps(h, x, cfg.L, cfg.rho));
    }
  }
  EXPECT_GE(pairs, 1000u);
}

TEST(Monotonicity, UpperBoundAndRadiiNeverGrow) {
  Rng rng(5);
  std::uniform_real_distribution<double> val(0.0, 5.0);
  SampleHistory h(1);
  const LipschitzConfig cfg{3.0, 0.6, 0.0};
  h.append(v1(0.0), val(rng));
  for (int i = 1; i < 200; ++i) {
    const double prev_ub = upper_bound(h);
    std::vector<double> prev_r;
    for (const Sample& s : h.samples()) prev_r.push_back(ball_radius(s, h, cfg));
    const double prev_min = h.min_value();
    h.append(v1(0.01 * i), val(rng));
    EXPECT_LE(upper_bound(h), prev_ub);
    for (std::size_t j = 0; j < prev_r.size(); ++j) {
      const double r = ball_radius(h.at(j + 1), h, cfg);
      if (h.min_value() < prev_min) {
        EXPECT_GE(r, prev_r[j]) << "radius formula with a smaller min";
      } else {
        EXPECT_EQ(r, prev_r[j]);
      }
    }
  }
}

TEST(Coverage, ZeroRadiusDegenerate) {
  const auto h = history_1d({{0.5, 0.0}});
  const auto probes = probe_grid(Box::uniform(1, 0, 1), 101);
  EXPECT_EQ(coverage_fraction(h, LipschitzConfig{1, 0, 0}, probes), 0.0);
}

TEST(Coverage, SingleBallCoversBox) {
  // Box [0,1] has radius 0.5 around its centre; f = L * 0.5 + margin.
  const double L = 4.0;
  const auto h = history_1d({{0.5, L * 0.5 + 1e-6}});
  const auto probes = probe_grid(Box::uniform(1, 0, 1), 10001);
  EXPECT_EQ(coverage_fraction(h, LipschitzConfig{L, 0, 0}, probes), 1.0);
  std::size_t inside = 0;
  for (const auto& p : probes) inside += oracle::ball_loop_in_rps(h, p, L, 0.0) ? 1 : 0;
  EXPECT_EQ(inside, probes.size());
}

TEST(Coverage, ShekelMidRunMatchesProbeLoop) {
  const BenchmarkFn& fn = find_benchmark("shekel1d");
  BranchPruneConfig cfg;
  cfg.lipschitz.L = fn.declared_L;
  cfg.max_outer_iters = 2;
  Rng rng(9);
  const GlobalResult r = optimize_global(fn.objective(), fn.domain, cfg, rng);
  const auto probes = probe_grid(fn.domain, 5001);
  for (double rho : {0.0, 0.3, 0.5, 0.8}) {
    LipschitzConfig lc{fn.declared_L, rho, 0.0};
    std::size_t inside = 0;
    for (const auto& p : probes) inside += oracle::ball_loop_in_rps(r.history, p, lc.L, rho) ? 1 : 0;
    EXPECT_EQ(coverage_fraction(r.history, lc, probes),
              static_cast<double>(inside) / static_cast<double>(probes.size()));
  }
}

TEST(ProbeGrid, IncludesEndpoints) {
  const auto g = probe_grid(Box::uniform(2, -1, 1), 3);
  ASSERT_EQ(g.size(), 9u);
  EXPECT_EQ(g.front(), ParamVector::Constant(2, -1));
  EXPECT_EQ(g.back(), ParamVector::Constant(2, 1));
}

TEST(Sandwich, HoldsWheneverCoverageIsComplete) {
  for (const char* name : {"abs1d", "shekel1d"}) {
    const BenchmarkFn& fn = find_benchmark(name);
    const std::size_t n = 10000;
    const auto probes = probe_grid(fn.domain, n);
    const double h = 1.0 / static_cast<double>(n - 1);
    const double f_grid = oracle::refined_min_1d(
        [&](double x) { return fn.evaluate(v1(x)); }, 0.0, 1.0, n);
    BranchPruneConfig cfg;
    cfg.lipschitz.L = fn.declared_L;
    cfg.lipschitz.epsilon = 0.001;
    std::size_t checked = 0;
    GlobalOptions opts;
    opts.on_phase_end = [&](const PhaseCheckpoint& cp) {
      if (coverage_fraction(cp.history, cp.lipschitz, probes) < 1.0) return;
      ++checked;
      EXPECT_LE(lower_estimator(cp.history, cp.lipschitz.rho), f_grid + cfg.lipschitz.L * h);
      EXPECT_LE(f_grid, upper_bound(cp.history));
    };
    Rng rng(1);
    optimize_global(fn.objective(), fn.domain, cfg, rng, opts);
    if (std::string(name) == "shekel1d") EXPECT_GT(checked, 0u);
  }
}

}  // namespace
}  // namespace bpgrad
