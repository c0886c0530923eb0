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

#include "bpgrad/models.hpp"

#include <cmath>
#include <random>

#include <fmt/core.h>

#include "bpgrad/error.hpp"

namespace bpgrad {
namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_shapes(const MlpSpec& spec, const ParamVector& params, const LabeledData& batch) {
  spec.validate();
  if (static_cast<std::size_t>(params.size()) != spec.param_count()) {
    throw Error(ErrorKind::kInvalidInput,
                fmt::format("expected {} parameters, got {}", spec.param_count(), params.size()));
  }
  if (batch.size() == 0) throw Error(ErrorKind::kInvalidInput, "empty batch");
  if (static_cast<std::size_t>(batch.features.cols()) != spec.input_width()) {
    throw Error(ErrorKind::kInvalidInput,
                fmt::format("batch has {} features, network expects {}", batch.features.cols(),
                            spec.input_width()));
  }
  batch.validate();
  if (static_cast<std::size_t>(batch.class_count) != spec.class_count()) {
    throw Error(ErrorKind::kInvalidInput, "batch class count does not match the output width");
  }
}

Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& z) {
  if (a == Activation::kTanh) return z.array().tanh().matrix();
  return z.cwiseMax(0.0);
}

// Derivative expressed through the pre-activation z and activation out.
Eigen::MatrixXd activation_slope(Activation a, const Eigen::MatrixXd& z,
                                 const Eigen::MatrixXd& out) {
  if (a == Activation::kTanh) return (1.0 - out.array().square()).matrix();
  return (z.array() > 0.0).cast<double>().matrix();
}

struct ForwardPass {
  std::vector<Eigen::MatrixXd> inputs;  // input to each layer
  std::vector<Eigen::MatrixXd> pre;     // pre-activation of each layer
};

ForwardPass run_forward(const MlpSpec& spec, const std::vector<DenseLayer>& layers,
                        const Eigen::MatrixXd& features) {
  ForwardPass fp;
  Eigen::MatrixXd a = features;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Eigen::MatrixXd z = a * layers[l].weights.transpose();
    z.rowwise() += layers[l].bias.transpose();
    fp.inputs.push_back(std::move(a));
    if (l + 1 < layers.size()) a = activate(spec.activation, z);
    fp.pre.push_back(std::move(z));
  }
  return fp;
}

// Mean cross-entropy and d(mean CE)/d(logits).
double cross_entropy(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
                     Eigen::MatrixXd* dlogits) {
  const auto n = logits.rows();
  double total = 0.0;
  if (dlogits) dlogits->resize(n, logits.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double top = logits.row(i).maxCoeff();
    const Eigen::RowVectorXd shifted = logits.row(i).array() - top;
    const Eigen::RowVectorXd e = shifted.array().exp();
    const double sum = e.sum();
    const int y = labels[static_cast<std::size_t>(i)];
    // (top - z_y) >= 0 and log(sum) >= 0 since sum includes exp(0).
    total += (top - logits(i, y)) + std::log(sum);
    if (dlogits) {
      dlogits->row(i) = e / sum;
      (*dlogits)(i, y) -= 1.0;
    }
  }
  if (dlogits) *dlogits /= static_cast<double>(n);
  return total / static_cast<double>(n);
}

}  // namespace

void LabeledData::validate() const {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw Error(ErrorKind::kInvalidInput, "feature rows and label count differ");
  }
  if (class_count <= 0) throw Error(ErrorKind::kInvalidInput, "class_count must be positive");
  for (int y : labels) {
    if (y < 0 || y >= class_count) {
      throw Error(ErrorKind::kInvalidInput, fmt::format("label {} out of range", y));
    }
  }
}

std::string_view to_string(Activation a) { return a == Activation::kTanh ? "tanh" : "relu"; }

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw Error(ErrorKind::kInvalidInput, fmt::format("unknown activation '{}'", name));
}

void MlpSpec::validate() const {
  if (layer_widths.size() < 2) throw Error(ErrorKind::kInvalidInput, "need at least 2 layer widths");
  for (std::size_t w : layer_widths) {
    if (w == 0) throw Error(ErrorKind::kInvalidInput, "layer widths must be positive");
  }
  if (!(weight_decay >= 0.0)) throw Error(ErrorKind::kInvalidInput, "weight_decay must be >= 0");
}

std::size_t MlpSpec::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_widths.size(); ++l) {
    n += layer_widths[l + 1] * (layer_widths[l] + 1);
  }
  return n;
}

std::vector<DenseLayer> unpack(const MlpSpec& spec, const ParamVector& params) {
  spec.validate();
  if (static_cast<std::size_t>(params.size()) != spec.param_count()) {
    throw Error(ErrorKind::kInvalidInput, "parameter count does not match spec");
  }
  std::vector<DenseLayer> layers;
  Eigen::Index offset = 0;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const auto in = static_cast<Eigen::Index>(spec.layer_widths[l]);
    const auto out = static_cast<Eigen::Index>(spec.layer_widths[l + 1]);
    DenseLayer layer;
    layer.weights = Eigen::Map<const RowMajorMatrix>(params.data() + offset, out, in);
    offset += out * in;
    layer.bias = params.segment(offset, out);
    offset += out;
    layers.push_back(std::move(layer));
  }
  return layers;
}

ParamVector pack(const MlpSpec& spec, const std::vector<DenseLayer>& layers) {
  spec.validate();
  if (layers.size() != spec.layer_count()) {
    throw Error(ErrorKind::kInvalidInput, "layer count does not match spec");
  }
  ParamVector params(static_cast<Eigen::Index>(spec.param_count()));
  Eigen::Index offset = 0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(spec.layer_widths[l]);
    const auto out = static_cast<Eigen::Index>(spec.layer_widths[l + 1]);
    if (layers[l].weights.rows() != out || layers[l].weights.cols() != in ||
        layers[l].bias.size() != out) {
      throw Error(ErrorKind::kInvalidInput, fmt::format("layer {} has the wrong shape", l));
    }
    Eigen::Map<RowMajorMatrix>(params.data() + offset, out, in) = layers[l].weights;
    offset += out * in;
    params.segment(offset, out) = layers[l].bias;
    offset += out;
  }
  return params;
}

ParamVector init_params(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const auto in = static_cast<Eigen::Index>(spec.layer_widths[l]);
    const auto out = static_cast<Eigen::Index>(spec.layer_widths[l + 1]);
    const double a = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> u(-a, a);
    DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out)};
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) layer.weights(r, c) = u(rng);
    }
    layers.push_back(std::move(layer));
  }
  return pack(spec, layers);
}

Eigen::MatrixXd forward(const MlpSpec& spec, const ParamVector& params,
                        const Eigen::MatrixXd& features) {
  const auto layers = unpack(spec, params);
  if (static_cast<std::size_t>(features.cols()) != spec.input_width()) {
    throw Error(ErrorKind::kInvalidInput, "feature width does not match the network input");
  }
  return run_forward(spec, layers, features).pre.back();
}

std::pair<double, ParamVector> value_and_gradient(const MlpSpec& spec,
                                                  const ParamVector& params,
                                                  const MiniBatch& batch, LossTerms terms) {
  check_shapes(spec, params, batch);
  double value = 0.0;
  ParamVector grad = ParamVector::Zero(params.size());

  if (terms != LossTerms::kRegularizerOnly) {
    const auto layers = unpack(spec, params);
    const ForwardPass fp = run_forward(spec, layers, batch.features);
    Eigen::MatrixXd delta;
    value += cross_entropy(fp.pre.back(), batch.labels, &delta);

    std::vector<DenseLayer> grads(layers.size());
    for (std::size_t l = layers.size(); l-- > 0;) {
      grads[l].weights = delta.transpose() * fp.inputs[l];
      grads[l].bias = delta.colwise().sum().transpose();
      if (l > 0) {
        const Eigen::MatrixXd upstream = delta * layers[l].weights;
        delta = upstream.cwiseProduct(
            activation_slope(spec.activation, fp.pre[l - 1], fp.inputs[l]));
      }
    }
    grad += pack(spec, grads);
  }
  if (terms != LossTerms::kDataOnly) {
    value += 0.5 * spec.weight_decay * params.squaredNorm();
    grad += spec.weight_decay * params;
  }
  return {value, std::move(grad)};
}

double objective(const MlpSpec& spec, const ParamVector& params, const MiniBatch& batch,
                 LossTerms terms) {
  check_shapes(spec, params, batch);
  double value = 0.0;
  if (terms != LossTerms::kRegularizerOnly) {
    value += cross_entropy(forward(spec, params, batch.features), batch.labels, nullptr);
  }
  if (terms != LossTerms::kDataOnly) value += 0.5 * spec.weight_decay * params.squaredNorm();
  return value;
}

ParamVector gradient(const MlpSpec& spec, const ParamVector& params, const MiniBatch& batch,
                     LossTerms terms) {
  return value_and_gradient(spec, params, batch, terms).second;
}

std::vector<int> predict(const MlpSpec& spec, const ParamVector& params,
                         const Eigen::MatrixXd& features) {
  const Eigen::MatrixXd logits = forward(spec, params, features);
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < logits.cols(); ++c) {
      if (logits(i, c) > logits(i, best)) best = c;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

double accuracy(const MlpSpec& spec, const ParamVector& params, const Dataset& data) {
  if (data.size() == 0) throw Error(ErrorKind::kInvalidInput, "empty dataset");
  const auto pred = predict(spec, params, data.features);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == data.labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

}  // namespace bpgrad
