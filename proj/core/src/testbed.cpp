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

#include "bpgrad/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/core.h>
#include <fmt/ranges.h>

#include "bpgrad/error.hpp"

namespace bpgrad {
namespace {

ParamVector vec1(double x) { return ParamVector::Constant(1, x); }

BenchmarkFn make_abs1d() {
  return {"abs1d", Box::uniform(1, 0.0, 1.0), 1.0,
          [](const ParamVector& x) { return std::abs(x[0] - 0.3); },
          [](const ParamVector& x) {
            const double s = x[0] - 0.3;
            return vec1(s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0));
          }};
}

// Inverted-Lorentzian wells under a constant ceiling. Global minimum near
// x = 0.6314 with value ~0.0647; a deceptive second well near 0.38.
constexpr double kShekelCeiling = 1.2;
constexpr double kShekelCenters[] = {0.12, 0.38, 0.63, 0.86};
constexpr double kShekelDepths[] = {0.55, 0.80, 0.95, 0.70};
constexpr double kShekelSharpness[] = {120.0, 260.0, 180.0, 90.0};

BenchmarkFn make_shekel1d() {
  // sup |f'| on [0, 1] is 8.287 (dense scan); declared with 10% headroom.
  return {"shekel1d", Box::uniform(1, 0.0, 1.0), 9.2,
          [](const ParamVector& x) {
            double f = kShekelCeiling;
            for (int i = 0; i < 4; ++i) {
              const double u = x[0] - kShekelCenters[i];
              f -= kShekelDepths[i] / (kShekelSharpness[i] * u * u + 1.0);
            }
            return f;
          },
          [](const ParamVector& x) {
            double g = 0.0;
            for (int i = 0; i < 4; ++i) {
              const double u = x[0] - kShekelCenters[i];
              const double q = kShekelSharpness[i] * u * u + 1.0;
              g += kShekelDepths[i] * 2.0 * kShekelSharpness[i] * u / (q * q);
            }
            return vec1(g);
          }};
}

BenchmarkFn make_quad2d() {
  const ParamVector c = (ParamVector(2) << 1.0, -2.0).finished();
  // Farthest corner from c is (-5, 5): distance sqrt(85).
  const double L = 2.0 * std::sqrt(85.0);
  return {"quad2d", Box::uniform(2, -5.0, 5.0), L,
          [c](const ParamVector& x) { return (x - c).squaredNorm() + 1.0; },
          [c](const ParamVector& x) { return ParamVector(2.0 * (x - c)); }};
}

BenchmarkFn make_rastrigin2d() {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  // sup |grad| = sqrt(2) * 71.333 = 100.88 on the box; declared with 10% headroom.
  return {"rastrigin2d", Box::uniform(2, -5.12, 5.12), 111.0,
          [](const ParamVector& x) {
            double f = 20.0;
            for (Eigen::Index i = 0; i < 2; ++i) f += x[i] * x[i] - 10.0 * std::cos(kTwoPi * x[i]);
            return f;
          },
          [](const ParamVector& x) {
            ParamVector g(2);
            for (Eigen::Index i = 0; i < 2; ++i) {
              g[i] = 2.0 * x[i] + 10.0 * kTwoPi * std::sin(kTwoPi * x[i]);
            }
            return g;
          }};
}

}  // namespace

const std::vector<BenchmarkFn>& registry() {
  static const std::vector<BenchmarkFn> fns = {make_abs1d(), make_shekel1d(), make_quad2d(),
                                               make_rastrigin2d()};
  return fns;
}

const BenchmarkFn& find_benchmark(std::string_view name) {
  for (const BenchmarkFn& fn : registry()) {
    if (fn.name == name) return fn;
  }
  throw Error(ErrorKind::kInvalidInput, fmt::format("unknown benchmark '{}'", name));
}

namespace {
constexpr double kRatioRoundoff = 1e-9;
}  // namespace

double certify_L(const BenchmarkFn& fn, std::size_t pairs, Rng& rng) {
  if (pairs < 10000) throw Error(ErrorKind::kInvalidInput, "certify_L needs at least 10^4 pairs");
  double worst = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const ParamVector a = fn.domain.sample(rng);
    const ParamVector b = fn.domain.sample(rng);
    const double dist = (a - b).norm();
    if (dist == 0.0) continue;
    const double ratio = std::abs(fn.evaluate(a) - fn.evaluate(b)) / dist;
    // Rounding in f(a) - f(b) can push an exact bound past L by a few ulps.
    if (ratio > fn.declared_L * (1.0 + kRatioRoundoff)) {
      throw Error(ErrorKind::kCertificationFailure,
                  fmt::format("{}: |df|/|dx| = {} exceeds declared L = {} at pair {} (a = [{}], "
                              "b = [{}])",
                              fn.name, ratio, fn.declared_L, k,
                              fmt::join(a.begin(), a.end(), ", "),
                              fmt::join(b.begin(), b.end(), ", ")));
    }
    worst = std::max(worst, ratio);
  }
  return worst;
}

Dataset make_blobs(std::size_t classes, std::size_t per_class, std::size_t d_in, double spread,
                   std::uint64_t seed) {
  if (classes < 2 || per_class == 0 || d_in == 0 || !(spread >= 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "make_blobs: invalid sizes");
  }
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, spread);
  Dataset data;
  data.class_count = static_cast<int>(classes);
  data.features.resize(static_cast<Eigen::Index>(classes * per_class),
                       static_cast<Eigen::Index>(d_in));
  data.labels.reserve(classes * per_class);
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    Eigen::VectorXd center = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d_in));
    if (d_in == 1) {
      center[0] = 2.0 * static_cast<double>(c) - static_cast<double>(classes - 1);
    } else {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) /
                           static_cast<double>(classes);
      center[0] = 2.0 * std::cos(angle);
      center[1] = 2.0 * std::sin(angle);
    }
    for (std::size_t k = 0; k < per_class; ++k, ++row) {
      for (Eigen::Index j = 0; j < center.size(); ++j) {
        data.features(row, j) = center[j] + noise(rng);
      }
      data.labels.push_back(static_cast<int>(c));
    }
  }
  return data;
}

BatchStream::BatchStream(const Dataset& data, std::size_t batch_size, std::uint64_t seed)
    : data_(&data), batch_size_(batch_size), seed_(seed) {
  if (batch_size == 0) throw Error(ErrorKind::kInvalidInput, "batch size must be positive");
  data.validate();
  if (data.size() == 0) throw Error(ErrorKind::kInvalidInput, "empty dataset");
}

std::size_t BatchStream::batches_per_epoch() const {
  return (data_->size() + batch_size_ - 1) / batch_size_;
}

std::vector<std::size_t> BatchStream::epoch_order(std::size_t epoch) const {
  std::vector<std::size_t> order(data_->size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(epoch), 0x5eedu};
  Rng rng(seq);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

std::vector<MiniBatch> BatchStream::epoch(std::size_t epoch) const {
  const auto order = epoch_order(epoch);
  std::vector<MiniBatch> out;
  out.reserve(batches_per_epoch());
  for (std::size_t start = 0; start < order.size(); start += batch_size_) {
    const std::size_t stop = std::min(order.size(), start + batch_size_);
    out.push_back(gather(*data_, std::span(order).subspan(start, stop - start)));
  }
  return out;
}

MiniBatch gather(const Dataset& data, std::span<const std::size_t> rows) {
  MiniBatch b;
  b.class_count = data.class_count;
  b.features.resize(static_cast<Eigen::Index>(rows.size()), data.features.cols());
  b.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    b.features.row(static_cast<Eigen::Index>(i)) =
        data.features.row(static_cast<Eigen::Index>(rows[i]));
    b.labels.push_back(data.labels[rows[i]]);
  }
  return b;
}

}  // namespace bpgrad
