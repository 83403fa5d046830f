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

#include "gazekit/svm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gazekit/error.h"

namespace gazekit {
namespace {

constexpr double kSupportThreshold = 1e-12;
constexpr double kTau = 1e-12;

}  // namespace

double rbf_kernel(std::span<const double> a, std::span<const double> b,
                  double gamma) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

KernelCache::KernelCache(const SampleMatrix& samples, double gamma,
                         std::size_t max_bytes)
    : samples_(samples), gamma_(gamma) {
  if (!(gamma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "kernel gamma must be positive");
  }
  const std::size_t row_bytes =
      std::max<std::size_t>(1, static_cast<std::size_t>(samples.rows())) *
      sizeof(double);
  max_rows_ = std::max<std::size_t>(2, max_bytes / row_bytes);
}

std::span<const double> KernelCache::row(std::size_t i) {
  if (auto it = rows_.find(i); it != rows_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second.second);
    return it->second.first;
  }
  if (rows_.size() >= max_rows_) {
    rows_.erase(lru_.back());
    lru_.pop_back();
  }
  const auto n = samples_.rows();
  std::vector<double> values(static_cast<std::size_t>(n));
  const auto xi = samples_.row(static_cast<Eigen::Index>(i));
  for (Eigen::Index j = 0; j < n; ++j) {
    values[static_cast<std::size_t>(j)] =
        std::exp(-gamma_ * (samples_.row(j) - xi).squaredNorm());
  }
  lru_.push_front(i);
  auto [it, inserted] = rows_.emplace(i, std::make_pair(std::move(values), lru_.begin()));
  return it->second.first;
}

DualSolution solve_svm_dual(KernelCache& kernel, std::span<const int> labels,
                            std::span<const double> upper_bounds,
                            const SmoOptions& options) {
  const std::size_t n = kernel.size();
  if (labels.size() != n || upper_bounds.size() != n) {
    throw Error(ErrorCode::kLengthMismatch,
                "labels and bounds must match the sample count");
  }
  bool has_pos = false;
  bool has_neg = false;
  for (std::size_t t = 0; t < n; ++t) {
    if (labels[t] == 1) {
      has_pos = true;
    } else if (labels[t] == -1) {
      has_neg = true;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "binary labels must be +1 or -1");
    }
    if (!(upper_bounds[t] > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "box bounds must be positive");
    }
  }
  if (!has_pos || !has_neg) {
    throw Error(ErrorCode::kInvalidArgument, "both labels must be present");
  }

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);
  const auto y = [&](std::size_t t) { return static_cast<double>(labels[t]); };
  const auto in_up = [&](std::size_t t) {
    return labels[t] == 1 ? alpha[t] < upper_bounds[t] : alpha[t] > 0.0;
  };
  const auto in_low = [&](std::size_t t) {
    return labels[t] == 1 ? alpha[t] > 0.0 : alpha[t] < upper_bounds[t];
  };

  const std::size_t budget = options.max_iterations_per_sample * n;
  DualSolution sol;
  double gap = std::numeric_limits<double>::infinity();
  std::size_t iter = 0;
  for (;; ++iter) {
    std::size_t i = n;
    std::size_t j = n;
    double g_max = -std::numeric_limits<double>::infinity();
    double g_min = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y(t) * grad[t];
      if (in_up(t) && v > g_max) {
        g_max = v;
        i = t;
      }
      if (in_low(t) && v < g_min) {
        g_min = v;
        j = t;
      }
    }
    gap = g_max - g_min;
    if (i == n || j == n || gap < options.epsilon) break;
    if (iter >= budget) {
      throw Error(ErrorCode::kNonConvergence,
                  "SMO stopped after " + std::to_string(iter) +
                      " iterations with KKT violation " + std::to_string(gap));
    }

    const std::span<const double> ki = kernel.row(i);
    const std::span<const double> kj = kernel.row(j);
    const double ci = upper_bounds[i];
    const double cj = upper_bounds[j];
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    double& ai = alpha[i];
    double& aj = alpha[j];

    // Curvature along the feasible direction, K_ii + K_jj - 2 K_ij, in both
    // label configurations.
    double quad = ki[i] + kj[j] - 2.0 * ki[j];
    if (quad <= 0.0) quad = kTau;
    if (labels[i] != labels[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > ci - cj) {
        if (ai > ci) {
          ai = ci;
          aj = ci - diff;
        }
      } else if (aj > cj) {
        aj = cj;
        ai = cj + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > ci) {
        if (ai > ci) {
          ai = ci;
          aj = sum - ci;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > cj) {
        if (aj > cj) {
          aj = cj;
          ai = sum - cj;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }

    const double dai = ai - old_ai;
    const double daj = aj - old_aj;
    const double yi = y(i);
    const double yj = y(j);
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y(t) * (yi * ki[t] * dai + yj * kj[t] * daj);
    }
  }

  // Offset: average over free variables, else the midpoint of the feasible
  // interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y(t) * grad[t];
    if (alpha[t] >= upper_bounds[t]) {
      if (labels[t] == -1) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else if (alpha[t] <= 0.0) {
      if (labels[t] == 1) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else {
      sum_free += yg;
      ++n_free;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free)
                                : 0.5 * (ub + lb);

  double objective = 0.0;
  for (std::size_t t = 0; t < n; ++t) objective += alpha[t] * (grad[t] - 1.0);

  sol.alpha = std::move(alpha);
  sol.bias = -rho;
  sol.objective = 0.5 * objective;
  sol.gap = gap;
  sol.iterations = iter;
  return sol;
}

BinarySvm train_binary_svm(const SampleMatrix& x, std::span<const int> labels,
                           double c, double gamma,
                           std::span<const double> sample_weight,
                           const SmoOptions& options) {
  KernelCache cache(x, gamma, options.cache_bytes);
  return train_binary_svm(cache, labels, c, sample_weight, options);
}

BinarySvm train_binary_svm(KernelCache& kernel, std::span<const int> labels,
                           double c, std::span<const double> sample_weight,
                           const SmoOptions& options) {
  const std::size_t n = kernel.size();
  if (!(c > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "C must be positive");
  }
  if (!sample_weight.empty() && sample_weight.size() != n) {
    throw Error(ErrorCode::kLengthMismatch, "one weight per sample required");
  }
  std::vector<double> bounds(n, c);
  if (!sample_weight.empty()) {
    for (std::size_t t = 0; t < n; ++t) bounds[t] = c * sample_weight[t];
  }
  const DualSolution sol = solve_svm_dual(kernel, labels, bounds, options);

  BinarySvm model;
  model.gamma = kernel.gamma();
  model.c = c;
  model.bias = sol.bias;
  std::vector<Eigen::Index> keep;
  for (std::size_t t = 0; t < n; ++t) {
    if (sol.alpha[t] > kSupportThreshold) {
      keep.push_back(static_cast<Eigen::Index>(t));
      model.dual_coef.push_back(sol.alpha[t] * static_cast<double>(labels[t]));
    }
  }
  const SampleMatrix& x = kernel.samples();
  model.support_vectors.resize(static_cast<Eigen::Index>(keep.size()), x.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    model.support_vectors.row(static_cast<Eigen::Index>(r)) = x.row(keep[r]);
  }
  return model;
}

double decision(const BinarySvm& model, std::span<const double> x) {
  const Eigen::Map<const Eigen::RowVectorXd> point(x.data(),
                                                   static_cast<Eigen::Index>(x.size()));
  double sum = model.bias;
  for (Eigen::Index r = 0; r < model.support_vectors.rows(); ++r) {
    const double d2 = (model.support_vectors.row(r) - point).squaredNorm();
    sum += model.dual_coef[static_cast<std::size_t>(r)] * std::exp(-model.gamma * d2);
  }
  return sum;
}

}  // namespace gazekit
