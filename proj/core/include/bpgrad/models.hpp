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
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bpgrad/types.hpp"

namespace bpgrad {

/// Features (one example per row) with integer class labels.
struct LabeledData {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  int class_count = 0;

  std::size_t size() const { return labels.size(); }
  void validate() const;
};

using Dataset = LabeledData;
using MiniBatch = LabeledData;

enum class Activation { kRelu, kTanh };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

/// Fully connected network: hidden layers apply `activation`, the last layer
/// produces logits. The objective is mean softmax cross-entropy plus
/// weight_decay * 0.5 * |params|^2.
struct MlpSpec {
  std::vector<std::size_t> layer_widths;
  Activation activation = Activation::kRelu;
  double weight_decay = 0.0;

  void validate() const;
  std::size_t input_width() const { return layer_widths.front(); }
  std::size_t class_count() const { return layer_widths.back(); }
  std::size_t layer_count() const { return layer_widths.size() - 1; }
  std::size_t param_count() const;
};

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
};

// Flat layout: for each layer in order, the weight matrix row-major
// (out x in), then the bias vector.
std::vector<DenseLayer> unpack(const MlpSpec& spec, const ParamVector& params);
ParamVector pack(const MlpSpec& spec, const std::vector<DenseLayer>& layers);

/// Glorot-uniform weights, zero biases.
ParamVector init_params(const MlpSpec& spec, std::uint64_t seed);

enum class LossTerms { kAll, kDataOnly, kRegularizerOnly };

double objective(const MlpSpec& spec, const ParamVector& params, const MiniBatch& batch,
                 LossTerms terms = LossTerms::kAll);

ParamVector gradient(const MlpSpec& spec, const ParamVector& params, const MiniBatch& batch,
                     LossTerms terms = LossTerms::kAll);

std::pair<double, ParamVector> value_and_gradient(const MlpSpec& spec,
                                                  const ParamVector& params,
                                                  const MiniBatch& batch,
                                                  LossTerms terms = LossTerms::kAll);

/// Logits, one row per example.
Eigen::MatrixXd forward(const MlpSpec& spec, const ParamVector& params,
                        const Eigen::MatrixXd& features);

/// Argmax class per row; ties go to the lowest class index.
std::vector<int> predict(const MlpSpec& spec, const ParamVector& params,
                         const Eigen::MatrixXd& features);

double accuracy(const MlpSpec& spec, const ParamVector& params, const Dataset& data);

}  // namespace bpgrad
