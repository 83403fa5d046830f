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

#ifndef GAZEKIT_SVM_H_
#define GAZEKIT_SVM_H_

#include <cstddef>
#include <list>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace gazekit {

// Samples stored one per row.
using SampleMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// exp(-gamma * |a - b|^2).
double rbf_kernel(std::span<const double> a, std::span<const double> b,
                  double gamma);

// Lazily evaluated RBF kernel rows over a fixed sample matrix, kept in an LRU
// cache bounded by `max_bytes`. One cache can back several machines trained
// on the same samples and gamma (the one-vs-rest machines, or a sweep over C).
class KernelCache {
 public:
  KernelCache(const SampleMatrix& samples, double gamma,
              std::size_t max_bytes = std::size_t{256} << 20);

  KernelCache(const KernelCache&) = delete;
  KernelCache& operator=(const KernelCache&) = delete;

  std::span<const double> row(std::size_t i);
  std::size_t size() const { return static_cast<std::size_t>(samples_.rows()); }
  double gamma() const { return gamma_; }
  const SampleMatrix& samples() const { return samples_; }

 private:
  const SampleMatrix& samples_;
  double gamma_;
  std::size_t max_rows_;
  std::list<std::size_t> lru_;
  std::unordered_map<std::size_t,
                     std::pair<std::vector<double>, std::list<std::size_t>::iterator>>
      rows_;
};

struct SmoOptions {
  // Stop when the maximal KKT violation gap falls below this value.
  double epsilon = 1e-5;
  // Iteration budget is max_iterations_per_sample * n.
  std::size_t max_iterations_per_sample = 100000;
  std::size_t cache_bytes = std::size_t{256} << 20;
};

// Full solution of the box-constrained dual
//   min 1/2 a^T Q a - e^T a,  0 <= a_i <= C_i,  y^T a = 0,  Q_ij = y_i y_j K_ij
struct DualSolution {
  std::vector<double> alpha;
  double bias = 0.0;  // f(x) = sum_i alpha_i y_i K(x_i, x) + bias
  double objective = 0.0;  // value of the minimized form above
  double gap = 0.0;        // final maximal violation
  std::size_t iterations = 0;
};

// SMO with maximal-violating-pair working-set selection. `upper_bounds` holds
// the per-sample C_i. Throws kInvalidArgument unless both labels occur, and
// kNonConvergence when the iteration budget runs out.
DualSolution solve_svm_dual(KernelCache& kernel, std::span<const int> labels,
                            std::span<const double> upper_bounds,
                            const SmoOptions& options = {});

struct BinarySvm {
  SampleMatrix support_vectors;
  std::vector<double> dual_coef;  // alpha_i * y_i per support vector
  double bias = 0.0;
  double gamma = 1.0;
  double c = 1.0;
};

// Trains with C_i = c * sample_weight[i] (weights default to 1).
BinarySvm train_binary_svm(const SampleMatrix& x, std::span<const int> labels,
                           double c, double gamma,
                           std::span<const double> sample_weight = {},
                           const SmoOptions& options = {});
BinarySvm train_binary_svm(KernelCache& kernel, std::span<const int> labels,
                           double c, std::span<const double> sample_weight = {},
                           const SmoOptions& options = {});

double decision(const BinarySvm& model, std::span<const double> x);

}  // namespace gazekit

#endif  // GAZEKIT_SVM_H_
