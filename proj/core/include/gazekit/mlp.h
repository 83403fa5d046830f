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

#ifndef GAZEKIT_MLP_H_
#define GAZEKIT_MLP_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gazekit/augment.h"
#include "gazekit/svc.h"

namespace gazekit {

// Baseline feed-forward classifier: 57 -> 100 -> 100 -> 100 -> 4 with ReLU
// hidden layers, softmax output and cross-entropy loss, trained with Adam.
struct MlpConfig {
  std::vector<int> hidden = {100, 100, 100};
  double learning_rate = 1e-3;
  int epochs = 200;
  int batch_size = 32;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
};

class MlpClassifier {
 public:
  using RowMatrix =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  MlpClassifier() = default;

  // He-normal weights, zero biases. `layer_sizes` includes input and output.
  static MlpClassifier initialized(std::vector<int> layer_sizes,
                                   std::uint64_t seed);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }

  // All weights and biases, layer by layer: W (out x in, row-major) then b.
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  Eigen::Map<const RowMatrix> weights(int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
  std::size_t weight_offset(int layer) const { return offsets_[static_cast<std::size_t>(layer)]; }

 private:
  std::vector<int> sizes_;
  std::vector<double> params_;
  std::vector<std::size_t> offsets_;
};

Eigen::VectorXd mlp_probabilities(const MlpClassifier& model,
                                  const FeatureVector& x);

// Mean cross-entropy over the batch.
double mlp_loss(const MlpClassifier& model,
                std::span<const LabeledFeature> batch);

// Gradient of mlp_loss in parameters() layout. Optionally reports the loss.
std::vector<double> mlp_gradient(const MlpClassifier& model,
                                 std::span<const LabeledFeature> batch,
                                 double* loss = nullptr);

// Throws kNonFiniteLoss if training diverges. `epoch_losses`, when given,
// receives the mean batch loss of every epoch.
MlpClassifier train_mlp_classifier(std::span<const LabeledFeature> samples,
                                   const MlpConfig& config,
                                   std::vector<double>* epoch_losses = nullptr);

ClassPrediction predict_mlp(const MlpClassifier& model, const FeatureVector& x);

}  // namespace gazekit

#endif  // GAZEKIT_MLP_H_
