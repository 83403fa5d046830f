// Copyright 2026 The gazekit Authors.
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

#include "gazekit/mlp.h"

#include <cmath>
#include <numeric>

#include "adam.h"
#include "gazekit/error.h"
#include "gazekit/random.h"

namespace gazekit {
namespace {

using Eigen::VectorXd;

struct Activations {
  std::vector<VectorXd> inputs;  // inputs[l] feeds layer l; inputs[0] = x
  std::vector<VectorXd> pre;     // pre-activation of each layer
  VectorXd probabilities;
};

VectorXd to_vector(const FeatureVector& x) {
  VectorXd v(kFeatureSize);
  for (int i = 0; i < kFeatureSize; ++i) v[i] = x[i];
  return v;
}

VectorXd softmax(const VectorXd& z) {
  const VectorXd e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

Activations forward_pass(const MlpClassifier& model, const FeatureVector& x) {
  Activations act;
  act.inputs.push_back(to_vector(x));
  const int layers = model.num_layers();
  for (int l = 0; l < layers; ++l) {
    VectorXd z = model.weights(l) * act.inputs.back() + model.bias(l);
    act.pre.push_back(z);
    if (l + 1 < layers) {
      act.inputs.push_back(z.cwiseMax(0.0));
    } else {
      act.probabilities = softmax(z);
    }
  }
  return act;
}

}  // namespace

MlpClassifier MlpClassifier::initialized(std::vector<int> layer_sizes,
                                         std::uint64_t seed) {
  if (layer_sizes.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "an MLP needs at least two layers");
  }
  MlpClassifier model;
  model.sizes_ = std::move(layer_sizes);
  std::size_t total = 0;
  for (int l = 0; l + 1 < static_cast<int>(model.sizes_.size()); ++l) {
    model.offsets_.push_back(total);
    const auto in = static_cast<std::size_t>(model.sizes_[static_cast<std::size_t>(l)]);
    const auto out = static_cast<std::size_t>(model.sizes_[static_cast<std::size_t>(l) + 1]);
    total += out * in + out;
  }
  model.params_.assign(total, 0.0);
  Rng rng(seed);
  for (int l = 0; l < model.num_layers(); ++l) {
    const auto in = static_cast<std::size_t>(model.sizes_[static_cast<std::size_t>(l)]);
    const auto out = static_cast<std::size_t>(model.sizes_[static_cast<std::size_t>(l) + 1]);
    const double stddev = std::sqrt(2.0 / static_cast<double>(in));
    const std::size_t base = model.offsets_[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < out * in; ++i) {
      model.params_[base + i] = rng.normal(0.0, stddev);
    }
  }
  return model;
}

Eigen::Map<const MlpClassifier::RowMatrix> MlpClassifier::weights(int layer) const {
  const auto l = static_cast<std::size_t>(layer);
  return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]};
}

Eigen::Map<const Eigen::VectorXd> MlpClassifier::bias(int layer) const {
  const auto l = static_cast<std::size_t>(layer);
  const std::size_t w = static_cast<std::size_t>(sizes_[l + 1]) *
                        static_cast<std::size_t>(sizes_[l]);
  return {params_.data() + offsets_[l] + w, sizes_[l + 1]};
}

Eigen::VectorXd mlp_probabilities(const MlpClassifier& model,
                                  const FeatureVector& x) {
  return forward_pass(model, x).probabilities;
}

double mlp_loss(const MlpClassifier& model,
                std::span<const LabeledFeature> batch) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyBatch, "empty batch");
  double sum = 0.0;
  for (const auto& s : batch) {
    const VectorXd p = mlp_probabilities(model, s.features);
    sum -= std::log(p[class_index(s.label)]);
  }
  return sum / static_cast<double>(batch.size());
}

std::vector<double> mlp_gradient(const MlpClassifier& model,
                                 std::span<const LabeledFeature> batch,
                                 double* loss) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyBatch, "empty batch");
  std::vector<double> grad(model.parameters().size(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  const int layers = model.num_layers();
  double total = 0.0;
  for (const auto& s : batch) {
    const Activations act = forward_pass(model, s.features);
    const int target = class_index(s.label);
    total -= std::log(act.probabilities[target]);
    // d(-log p_target)/dz = p - onehot(target).
    VectorXd delta = act.probabilities;
    delta[target] -= 1.0;
    delta *= scale;
    for (int l = layers - 1; l >= 0; --l) {
      const auto lu = static_cast<std::size_t>(l);
      const int in = model.layer_sizes()[lu];
      const int out = model.layer_sizes()[lu + 1];
      Eigen::Map<MlpClassifier::RowMatrix> gw(grad.data() + model.weight_offset(l), out, in);
      Eigen::Map<VectorXd> gb(grad.data() + model.weight_offset(l) +
                                  static_cast<std::size_t>(out) * static_cast<std::size_t>(in),
                              out);
      gw.noalias() += delta * act.inputs[lu].transpose();
      gb += delta;
      if (l > 0) {
        VectorXd back = model.weights(l).transpose() * delta;
        const VectorXd& z = act.pre[lu - 1];
        for (int i = 0; i < back.size(); ++i) {
          if (!(z[i] > 0.0)) back[i] = 0.0;
        }
        delta = std::move(back);
      }
    }
  }
  if (loss) *loss = total * scale;
  return grad;
}

MlpClassifier train_mlp_classifier(std::span<const LabeledFeature> samples,
                                   const MlpConfig& config,
                                   std::vector<double>* epoch_losses) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyBatch, "no training samples");
  if (config.epochs < 0 || config.batch_size <= 0) {
    throw Error(ErrorCode::kConfigError, "epochs and batch size must be positive");
  }
  std::vector<int> sizes = {kFeatureSize};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(kNumClasses);
  MlpClassifier model = MlpClassifier::initialized(sizes, config.seed);
  AdamState adam(model.parameters().size(), config.beta1, config.beta2,
                 config.epsilon);
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<LabeledFeature> batch;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(samples[order[i]]);
      double loss = 0.0;
      const std::vector<double> grad = mlp_gradient(model, batch, &loss);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::kNonFiniteLoss,
                    "MLP loss became non-finite in epoch " + std::to_string(epoch));
      }
      adam.step(model.parameters(), grad, config.learning_rate);
      epoch_loss += loss;
      ++batches;
    }
    if (epoch_losses) epoch_losses->push_back(epoch_loss / static_cast<double>(batches));
  }
  return model;
}

ClassPrediction predict_mlp(const MlpClassifier& model, const FeatureVector& x) {
  const VectorXd p = mlp_probabilities(model, x);
  int best = 0;
  for (int c = 1; c < p.size(); ++c) {
    if (p[c] > p[best]) best = c;
  }
  return {kClassOrder[static_cast<std::size_t>(best)], p[best]};
}

}  // namespace gazekit
