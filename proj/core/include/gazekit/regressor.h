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

#ifndef GAZEKIT_REGRESSOR_H_
#define GAZEKIT_REGRESSOR_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gazekit/augment.h"
#include "gazekit/features.h"

namespace gazekit {

// Gate for one (coordinate, confidence) pair:
//   ReLU(a * v + b) * sigmoid(p * c + q)
struct CguUnit {
  double a = 1.0;
  double b = 1.0;
  double p = 1.0;
  double q = 1.0;
};

double cgu_forward(const CguUnit& unit, double v, double c);

struct TrainConfig {
  int epochs = 100;
  int batch_size = 400;
  double lr0 = 0.05;
  double lr_decay = 0.9;  // learning rate at epoch e is lr0 * lr_decay^e
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double init_stddev = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// 38 gated units (x_i, k_i) and (y_i, k_i) per keypoint in canonical order,
// then FC 38->19 (ReLU), FC 19->19 (ReLU) and a linear 19->3 output whose
// third value passes through a sigmoid.
//
// All parameters live in one flat vector:
//   [cgu: 38 x (a, b, p, q)] [W1 19x38] [b1] [W2 19x19] [b2] [W3 3x19] [b3]
// with matrices row-major. The first two outputs are mapped to pixels as
// output_offset + output_scale * o.
class CguRegressor {
 public:
  static constexpr int kUnits = 2 * kNumKeypoints;  // 38
  static constexpr int kHidden = kNumKeypoints;     // 19
  static constexpr int kOutputs = 3;

  static constexpr std::size_t kCguOffset = 0;
  static constexpr std::size_t kW1Offset = kCguOffset + 4 * kUnits;
  static constexpr std::size_t kB1Offset = kW1Offset + kHidden * kUnits;
  static constexpr std::size_t kW2Offset = kB1Offset + kHidden;
  static constexpr std::size_t kB2Offset = kW2Offset + kHidden * kHidden;
  static constexpr std::size_t kW3Offset = kB2Offset + kHidden;
  static constexpr std::size_t kB3Offset = kW3Offset + kOutputs * kHidden;
  static constexpr std::size_t kNumParameters = kB3Offset + kOutputs;

  // CGU scalars all one, every other parameter zero.
  CguRegressor();

  // CGU scalars all one; FC and output weights N(0, stddev), biases zero.
  static CguRegressor initialized(std::uint64_t seed, double stddev = 0.05);

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  CguUnit unit(int j) const;
  void set_unit(int j, const CguUnit& u);

  double l2_cgu = 1e-3;
  double l2_fc = 1e-4;
  // Fitted to the training targets' per-coordinate mean and standard
  // deviation; not trainable.
  Vec2 output_offset = Vec2::Zero();
  Vec2 output_scale = Vec2::Ones();
  // Configuration the parameters were trained with, kept for provenance.
  TrainConfig train_config;

  friend bool operator==(const CguRegressor&, const CguRegressor&) = default;

 private:
  std::vector<double> params_;
};

struct RegressorOutput {
  Vec2 gaze2d = Vec2::Zero();  // pixels
  double sigma = 0.5;          // uncalibrated confidence in (0, 1)
};

RegressorOutput forward(const CguRegressor& net, const FeatureVector& fv);
inline RegressorOutput predict(const CguRegressor& net, const FeatureVector& fv) {
  return forward(net, fv);
}

struct LossTerms {
  double data = 0.0;     // sqrt(sum of squared coordinate errors / (2B))
  double penalty = 0.0;  // L2 on CGU scalars and FC1/FC2 weights
  double total() const { return data + penalty; }
};

// Throws kEmptyBatch.
LossTerms loss_terms(const CguRegressor& net,
                     std::span<const RegressionSample> batch);
inline double loss(const CguRegressor& net,
                   std::span<const RegressionSample> batch) {
  return loss_terms(net, batch).total();
}

// Gradient of loss() in parameters() layout. ReLU'(0) is taken as 0; the data
// term contributes nothing when it is exactly zero.
std::vector<double> backward(const CguRegressor& net,
                             std::span<const RegressionSample> batch);

struct EpochLog {
  int epoch = 0;
  double learning_rate = 0.0;
  double loss = 0.0;  // mean total loss over the epoch's batches
};

struct RegressorTrainResult {
  CguRegressor net;
  std::vector<EpochLog> log;
};

// Adam with per-epoch learning-rate decay and seeded reshuffling each epoch.
// Throws kNonFiniteLoss naming the epoch.
RegressorTrainResult train_regressor(std::span<const RegressionSample> samples,
                                     const TrainConfig& config);

std::string serialize_regressor(const CguRegressor& net);
CguRegressor parse_regressor(std::string_view text);
void save_regressor(const CguRegressor& net, const std::filesystem::path& path);
CguRegressor load_regressor(const std::filesystem::path& path);

}  // namespace gazekit

#endif  // GAZEKIT_REGRESSOR_H_
