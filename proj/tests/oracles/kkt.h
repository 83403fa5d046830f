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

#ifndef GAZEKIT_TESTS_ORACLES_KKT_H_
#define GAZEKIT_TESTS_ORACLES_KKT_H_

#include <algorithm>
#include <cstddef>
#include <span>

#include <Eigen/Core>

namespace gazekit::oracle {

// Largest violation of the soft-margin KKT conditions for
// f(x_i) = sum_j alpha_j y_j K_ij + b:
//   alpha_i = 0        ->  y_i f_i >= 1
//   0 < alpha_i < C_i  ->  y_i f_i  = 1
//   alpha_i = C_i      ->  y_i f_i <= 1
// A value <= tol means every condition holds within tol.
inline double kkt_violation(const Eigen::MatrixXd& kernel, std::span<const int> y,
                            std::span<const double> c,
                            std::span<const double> alpha, double bias) {
  const std::size_t n = y.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = bias;
    for (std::size_t j = 0; j < n; ++j) {
      f += alpha[j] * y[j] * kernel(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const double margin = y[i] * f;
    double v;
    if (alpha[i] <= 0.0) {
      v = 1.0 - margin;
    } else if (alpha[i] >= c[i]) {
      v = margin - 1.0;
    } else {
      v = std::abs(margin - 1.0);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace gazekit::oracle

#endif  // GAZEKIT_TESTS_ORACLES_KKT_H_
