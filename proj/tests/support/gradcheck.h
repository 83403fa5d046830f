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

#ifndef GAZEKIT_TESTS_SUPPORT_GRADCHECK_H_
#define GAZEKIT_TESTS_SUPPORT_GRADCHECK_H_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "gazekit/mlp.h"
#include "gazekit/random.h"
#include "gazekit/regressor.h"
#include "oracles/finite_difference.h"
#include "oracles/regressor_oracle.h"

namespace gazekit::testing {

// Central-difference step and the distance every ReLU input must keep from
// its kink so that no difference straddles it.
inline constexpr double kFdStep = 1e-5;
inline constexpr double kKinkMargin = 1e-3;

// Random (x, y, k) triplets, not normalized, so all CGU branches are active.
inline FeatureVector raw_feature(Rng& rng) {
  FeatureVector fv;
  for (int i = 0; i < kNumKeypoints; ++i) {
    fv.set(i, rng.normal(), rng.normal(), rng.uniform(0.05, 1.0));
  }
  return fv;
}

// Random net with random CGU scalars and output affine.
inline CguRegressor random_regressor(Rng& rng) {
  auto net = CguRegressor::initialized(rng.next(), 0.4);
  for (int j = 0; j < CguRegressor::kUnits; ++j) {
    net.set_unit(j, {rng.normal(0, 1), rng.normal(0.3, 0.5), rng.normal(0, 1), rng.normal(0, 1)});
  }
  auto p = net.parameters();
  for (std::size_t i = CguRegressor::kB1Offset; i < CguRegressor::kW2Offset; ++i) {
    p[i] = rng.normal(0, 0.1);
  }
  net.output_offset = Vec2(rng.normal(0, 5), rng.normal(0, 5));
  net.output_scale = Vec2(rng.uniform(1, 30), rng.uniform(1, 30));
  return net;
}

// A batch whose every ReLU input clears kKinkMargin under `net`.
inline std::vector<RegressionSample> kink_free_batch(const CguRegressor& net, Rng& rng,
                                                     int size) {
  std::vector<RegressionSample> batch;
  while (static_cast<int>(batch.size()) < size) {
    RegressionSample s{raw_feature(rng), Vec2(rng.normal(0, 20), rng.normal(0, 20))};
    if (oracle::straight_line_forward(net, s.features).min_abs_preactivation > kKinkMargin) {
      batch.push_back(s);
    }
  }
  return batch;
}

// Checks backward() on one fresh kink-free batch for `net`.
inline oracle::GradientComparison regressor_batch_check(CguRegressor& net, Rng& rng,
                                                        int batch_size = 6) {
  const auto batch = kink_free_batch(net, rng, batch_size);
  const auto analytic = backward(net, batch);
  const auto numeric = oracle::central_differences(
      net.parameters(), [&] { return loss(net, batch); }, kFdStep);
  return oracle::compare_gradients(analytic, numeric);
}

inline oracle::GradientComparison regressor_gradient_check(std::uint64_t seed,
                                                           int batch_size = 6) {
  Rng rng(seed);
  CguRegressor net = random_regressor(rng);
  return regressor_batch_check(net, rng, batch_size);
}

inline double mlp_min_abs_preactivation(const MlpClassifier& model, const FeatureVector& x) {
  Eigen::VectorXd h(kFeatureSize);
  for (int i = 0; i < kFeatureSize; ++i) h[i] = x[i];
  double closest = std::numeric_limits<double>::infinity();
  for (int l = 0; l + 1 < model.num_layers(); ++l) {
    const Eigen::VectorXd z = model.weights(l) * h + model.bias(l);
    closest = std::min(closest, z.cwiseAbs().minCoeff());
    h = z.cwiseMax(0.0);
  }
  return closest;
}

// Full-size nets start with small random biases so that no unit sits at zero.
inline MlpClassifier random_mlp(Rng& rng, std::vector<int> sizes) {
  MlpClassifier model = MlpClassifier::initialized(std::move(sizes), rng.next());
  for (double& p : model.parameters()) p += rng.normal(0, 0.02);
  return model;
}

// Compares `coordinates` randomly chosen parameters (all of them when 0) on
// one fresh kink-free batch.
inline oracle::GradientComparison mlp_batch_check(MlpClassifier& model, Rng& rng,
                                                  std::size_t coordinates = 0,
                                                  int batch_size = 4) {
  std::vector<LabeledFeature> batch;
  while (static_cast<int>(batch.size()) < batch_size) {
    LabeledFeature s{raw_feature(rng), kClassOrder[rng.index(kNumClasses)]};
    if (mlp_min_abs_preactivation(model, s.features) > kKinkMargin) batch.push_back(s);
  }
  const auto analytic = mlp_gradient(model, batch);
  auto params = model.parameters();
  std::vector<std::size_t> picks;
  if (coordinates == 0 || coordinates >= params.size()) {
    for (std::size_t i = 0; i < params.size(); ++i) picks.push_back(i);
  } else {
    picks = rng.sample_without_replacement(params.size(), coordinates);
  }
  oracle::GradientComparison worst;
  for (std::size_t i : picks) {
    const double saved = params[i];
    params[i] = saved + kFdStep;
    const double up = mlp_loss(model, batch);
    params[i] = saved - kFdStep;
    const double down = mlp_loss(model, batch);
    params[i] = saved;
    const double e = oracle::relative_error(analytic[i], (up - down) / (2 * kFdStep));
    if (e > worst.max_relative_error) worst = {e, i};
  }
  return worst;
}

inline oracle::GradientComparison mlp_gradient_check(std::uint64_t seed,
                                                     std::vector<int> sizes,
                                                     std::size_t coordinates = 0,
                                                     int batch_size = 4) {
  Rng rng(seed);
  MlpClassifier model = random_mlp(rng, std::move(sizes));
  return mlp_batch_check(model, rng, coordinates, batch_size);
}

}  // namespace gazekit::testing

#endif  // GAZEKIT_TESTS_SUPPORT_GRADCHECK_H_
