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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gazekit/random.h"
#include "oracles/kkt.h"
#include "oracles/qp_oracle.h"
#include "support/fixtures.h"

namespace gazekit {
namespace {

using testing::code_of;

Eigen::MatrixXd dense_kernel(const SampleMatrix& x, double gamma) {
  const auto n = x.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      k(i, j) = std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());
    }
  }
  return k;
}

std::span<const double> row_span(const SampleMatrix& x, Eigen::Index i) {
  return {x.row(i).data(), static_cast<std::size_t>(x.cols())};
}

struct Problem {
  SampleMatrix x;
  std::vector<int> y;
  std::vector<double> c;
  double gamma = 1.0;
};

// Two Gaussian blobs in `dims` dimensions, separated by `shift`.
Problem random_problem(Rng& rng, int n, int dims, double shift) {
  Problem p;
  p.x.resize(n, dims);
  for (int i = 0; i < n; ++i) {
    const int label = (i % 2 == 0) ? 1 : -1;
    p.y.push_back(label);
    for (int d = 0; d < dims; ++d) {
      p.x(i, d) = rng.normal() + (d == 0 ? 0.5 * shift * label : 0.0);
    }
  }
  p.gamma = rng.uniform(0.1, 1.0);
  const double c = std::pow(10.0, rng.uniform(-1.0, 2.0));
  for (int i = 0; i < n; ++i) p.c.push_back(c * rng.uniform(0.5, 2.0));
  return p;
}

TEST(RbfKernel, Values) {
  const std::vector<double> a = {1.0, 2.0}, b = {1.0, 3.0}, far = {100.0, -100.0};
  EXPECT_EQ(rbf_kernel(a, a, 0.7), 1.0);
  EXPECT_NEAR(rbf_kernel(a, b, 1.0), 0.36787944117144233, 1e-15);
  EXPECT_LT(rbf_kernel(a, b, 1e3), 1e-300);
  EXPECT_GT(rbf_kernel(a, far, 1e-6), 0.0);
}

TEST(KernelCache, RowsMatchDirectEvaluationUnderEviction) {
  Rng rng(51);
  SampleMatrix x(30, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  // Room for two rows only.
  KernelCache cache(x, 0.3, 2 * 30 * sizeof(double));
  const Eigen::MatrixXd k = dense_kernel(x, 0.3);
  for (int pass = 0; pass < 3; ++pass) {
    for (std::size_t i = 0; i < 30; i += 1 + pass) {
      const auto row = cache.row(i);
      for (std::size_t j = 0; j < 30; ++j) {
        EXPECT_NEAR(row[j], k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), 1e-15);
      }
    }
  }
}

TEST(BinarySvm, SymmetricPairHasZeroBias) {
  SampleMatrix x(2, 2);
  x << -1, 0, 1, 0;
  const std::vector<int> y = {-1, 1};
  const auto m = train_binary_svm(x, y, 10.0, 0.5);
  ASSERT_EQ(m.dual_coef.size(), 2u);
  EXPECT_NEAR(std::abs(m.dual_coef[0]), std::abs(m.dual_coef[1]), 1e-12);
  EXPECT_GT(std::abs(m.dual_coef[0]), 0.0);
  EXPECT_NEAR(m.bias, 0.0, 1e-12);
  const std::vector<double> mid = {0.0, 0.0};
  EXPECT_NEAR(decision(m, mid), 0.0, 1e-12);
}

TEST(BinarySvm, XorIsSeparatedAndMatchesOracle) {
  SampleMatrix x(4, 2);
  x << 0, 0, 1, 1, 0, 1, 1, 0;
  const std::vector<int> y = {1, 1, -1, -1};
  const std::vector<double> c(4, 10.0);
  KernelCache cache(x, 1.0);
  const auto sol = solve_svm_dual(cache, y, c);
  const auto ref = oracle::solve_dense_dual(dense_kernel(x, 1.0), y, c);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(sol.alpha[i] > 1e-6, ref.alpha[static_cast<Eigen::Index>(i)] > 1e-6);
    EXPECT_NEAR(sol.alpha[i], ref.alpha[static_cast<Eigen::Index>(i)], 1e-4);
  }
  const auto m = train_binary_svm(x, y, 10.0, 1.0);
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_GT(y[static_cast<std::size_t>(i)] * decision(m, row_span(x, i)), 0.0);
  }
}

TEST(BinarySvm, SeparableCloudMatchesDenseOracle) {
  Rng rng(52);
  const Problem p = random_problem(rng, 20, 2, 6.0);
  KernelCache cache(p.x, p.gamma);
  const auto sol = solve_svm_dual(cache, p.y, p.c);
  const auto ref = oracle::solve_dense_dual(dense_kernel(p.x, p.gamma), p.y, p.c);
  EXPECT_LE(std::abs(sol.objective - ref.objective), 1e-6 * std::abs(ref.objective));
}

TEST(BinarySvm, HardMarginSupportVectorsSitOnTheMargin) {
  Rng rng(53);
  Problem p = random_problem(rng, 16, 2, 8.0);
  const auto m = train_binary_svm(p.x, p.y, 1e6, 0.5);
  KernelCache cache(p.x, 0.5);
  const std::vector<double> bounds(16, 1e6);
  const auto sol = solve_svm_dual(cache, p.y, bounds);
  for (Eigen::Index i = 0; i < 16; ++i) {
    const double f = decision(m, row_span(p.x, i));
    if (sol.alpha[static_cast<std::size_t>(i)] > 1e-12) {
      EXPECT_GE(std::abs(f), 1.0 - 1e-3);
    }
    EXPECT_GE(p.y[static_cast<std::size_t>(i)] * f, 1.0 - 1e-3);
  }
}

TEST(BinarySvm, FarPointDecisionIsBias) {
  Rng rng(54);
  const Problem p = random_problem(rng, 12, 3, 2.0);
  const auto m = train_binary_svm(p.x, p.y, 1.0, 1.0);
  const std::vector<double> far = {1e3, 1e3, 1e3};
  EXPECT_EQ(decision(m, far), m.bias);
}

TEST(BinarySvm, DualInvariantsOnRandomProblems) {
  Rng rng(55);
  for (int t = 0; t < 30; ++t) {
    const Problem p = random_problem(rng, 10 + static_cast<int>(rng.index(40)), 3,
                                     rng.uniform(0.0, 4.0));
    KernelCache cache(p.x, p.gamma);
    const auto sol = solve_svm_dual(cache, p.y, p.c);
    double balance = 0.0;
    for (std::size_t i = 0; i < p.y.size(); ++i) {
      EXPECT_GE(sol.alpha[i], 0.0);
      EXPECT_LE(sol.alpha[i], p.c[i]);
      balance += sol.alpha[i] * p.y[i];
    }
    EXPECT_LE(std::abs(balance), 1e-6);
    EXPECT_LE(oracle::kkt_violation(dense_kernel(p.x, p.gamma), p.y, p.c, sol.alpha, sol.bias),
              1e-3);
  }
}

TEST(BinarySvm, ObjectiveMatchesOracleOnSmallInstances) {
  Rng rng(56);
  for (int t = 0; t < 20; ++t) {
    const Problem p = random_problem(rng, 4 + static_cast<int>(rng.index(17)), 2,
                                     rng.uniform(0.0, 3.0));
    KernelCache cache(p.x, p.gamma);
    const auto sol = solve_svm_dual(cache, p.y, p.c);
    const auto ref = oracle::solve_dense_dual(dense_kernel(p.x, p.gamma), p.y, p.c);
    EXPECT_LE(std::abs(sol.objective - ref.objective), 1e-6 * std::abs(ref.objective)) << t;
  }
}

// Duplicating a sample m times with weight 1 and weighting it by m describe
// the same problem, so the decision functions agree.
TEST(BinarySvm, WeightingEqualsDuplication) {
  Rng rng(57);
  const Problem p = random_problem(rng, 12, 2, 1.0);
  const int m = 3;
  SmoOptions tight;
  tight.epsilon = 1e-10;

  std::vector<double> weights(12, 1.0);
  SampleMatrix dup(12 + (m - 1) * 6, 2);
  std::vector<int> dup_y;
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < 12; ++i) {
    const bool positive = p.y[static_cast<std::size_t>(i)] == 1;
    if (positive) weights[static_cast<std::size_t>(i)] = m;
    for (int r = 0; r < (positive ? m : 1); ++r) {
      dup.row(row++) = p.x.row(i);
      dup_y.push_back(p.y[static_cast<std::size_t>(i)]);
    }
  }
  const auto weighted = train_binary_svm(p.x, p.y, 1.0, 0.5, weights, tight);
  const auto duplicated = train_binary_svm(dup, dup_y, 1.0, 0.5, {}, tight);
  for (int t = 0; t < 50; ++t) {
    const std::vector<double> q = {rng.normal(0, 2), rng.normal(0, 2)};
    EXPECT_NEAR(decision(weighted, q), decision(duplicated, q), 1e-6);
  }
}

TEST(BinarySvm, Errors) {
  SampleMatrix x(3, 1);
  x << 0, 1, 2;
  const std::vector<int> one_label = {1, 1, 1};
  EXPECT_EQ(code_of([&] { train_binary_svm(x, one_label, 1.0, 1.0); }),
            ErrorCode::kInvalidArgument);
  const std::vector<int> y = {1, -1, 1};
  EXPECT_EQ(code_of([&] { train_binary_svm(x, y, 0.0, 1.0); }), ErrorCode::kInvalidArgument);
  const std::vector<double> bad_weights = {1.0};
  EXPECT_EQ(code_of([&] { train_binary_svm(x, y, 1.0, 1.0, bad_weights); }),
            ErrorCode::kLengthMismatch);
  SmoOptions starved;
  starved.max_iterations_per_sample = 0;
  EXPECT_EQ(code_of([&] { train_binary_svm(x, y, 1.0, 1.0, {}, starved); }),
            ErrorCode::kNonConvergence);
}

}  // namespace
}  // namespace gazekit
