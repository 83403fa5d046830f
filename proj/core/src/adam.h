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

#ifndef GAZEKIT_SRC_ADAM_H_
#define GAZEKIT_SRC_ADAM_H_

#include <cmath>
#include <span>
#include <vector>

namespace gazekit {

// Bias-corrected Adam over a flat parameter vector.
class AdamState {
 public:
  AdamState(std::size_t n, double beta1, double beta2, double epsilon)
      : m_(n, 0.0), v_(n, 0.0), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

  void step(std::span<double> params, std::span<const double> grad,
            double learning_rate) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
      const double m_hat = m_[i] / c1;
      const double v_hat = v_[i] / c2;
      params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + epsilon_);
    }
  }

 private:
  std::vector<double> m_;
  std::vector<double> v_;
  double beta1_;
  double beta2_;
  double epsilon_;
  long t_ = 0;
};

}  // namespace gazekit

#endif  // GAZEKIT_SRC_ADAM_H_
