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

#ifndef GAZEKIT_TESTS_ORACLES_REGRESSOR_ORACLE_H_
#define GAZEKIT_TESTS_ORACLES_REGRESSOR_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <span>

#include <Eigen/Core>

#include "gazekit/regressor.h"

namespace gazekit::oracle {

struct ForwardValue {
  Eigen::Vector2d gaze2d;
  double sigma = 0.0;
  // Distance of the closest ReLU input to its kink.
  double min_abs_preactivation = 0.0;
};

// The network written as whole-layer matrix expressions over the documented
// flat parameter layout.
inline ForwardValue straight_line_forward(const CguRegressor& net,
                                          const FeatureVector& fv) {
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using R = CguRegressor;
  const double* w = net.parameters().data();

  const Eigen::Map<const RowMat> cgu(w + R::kCguOffset, R::kUnits, 4);
  Eigen::VectorXd v(R::kUnits), c(R::kUnits);
  for (int i = 0; i < kNumKeypoints; ++i) {
    v[2 * i] = fv.x(i);
    v[2 * i + 1] = fv.y(i);
    c[2 * i] = fv.k(i);
    c[2 * i + 1] = fv.k(i);
  }
  const Eigen::ArrayXd lin = cgu.col(0).array() * v.array() + cgu.col(1).array();
  const Eigen::ArrayXd gate =
      1.0 / (1.0 + (-(cgu.col(2).array() * c.array() + cgu.col(3).array())).exp());
  const Eigen::VectorXd h0 = (lin.max(0.0) * gate).matrix();

  const Eigen::Map<const RowMat> w1(w + R::kW1Offset, R::kHidden, R::kUnits);
  const Eigen::Map<const Eigen::VectorXd> b1(w + R::kB1Offset, R::kHidden);
  const Eigen::Map<const RowMat> w2(w + R::kW2Offset, R::kHidden, R::kHidden);
  const Eigen::Map<const Eigen::VectorXd> b2(w + R::kB2Offset, R::kHidden);
  const Eigen::Map<const RowMat> w3(w + R::kW3Offset, R::kOutputs, R::kHidden);
  const Eigen::Map<const Eigen::VectorXd> b3(w + R::kB3Offset, R::kOutputs);

  const Eigen::VectorXd h1 = (w1 * h0 + b1).cwiseMax(0.0);
  const Eigen::VectorXd h2 = (w2 * h1 + b2).cwiseMax(0.0);
  const Eigen::VectorXd out = w3 * h2 + b3;

  ForwardValue result;
  result.min_abs_preactivation = std::min(
      {lin.abs().minCoeff(), (w1 * h0 + b1).cwiseAbs().minCoeff(),
       (w2 * h1 + b2).cwiseAbs().minCoeff()});
  result.gaze2d = net.output_offset + net.output_scale.cwiseProduct(out.head<2>());
  result.sigma = 1.0 / (1.0 + std::exp(-out[2]));
  return result;
}

// sqrt(sum |e|^2 / 2B) plus the L2 terms, from the forward oracle.
inline double straight_line_loss(const CguRegressor& net,
                                 std::span<const RegressionSample> batch) {
  double sq = 0.0;
  for (const auto& s : batch) {
    sq += (straight_line_forward(net, s.features).gaze2d - s.target).squaredNorm();
  }
  using R = CguRegressor;
  const auto w = net.parameters();
  auto sum_sq = [&](std::size_t from, std::size_t to) {
    double t = 0.0;
    for (std::size_t i = from; i < to; ++i) t += w[i] * w[i];
    return t;
  };
  return std::sqrt(sq / (2.0 * static_cast<double>(batch.size()))) +
         net.l2_cgu * sum_sq(R::kCguOffset, R::kW1Offset) +
         net.l2_fc * (sum_sq(R::kW1Offset, R::kB1Offset) + sum_sq(R::kW2Offset, R::kB2Offset));
}

}  // namespace gazekit::oracle

#endif  // GAZEKIT_TESTS_ORACLES_REGRESSOR_ORACLE_H_
