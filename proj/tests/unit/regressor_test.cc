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

#include "gazekit/regressor.h"

#include <cmath>
#include <filesystem>
#include <limits>

#include <gtest/gtest.h>

#include "gazekit/synthgen.h"
#include "oracles/regressor_oracle.h"
#include "support/fixtures.h"
#include "support/gradcheck.h"

namespace gazekit {
namespace {

using R = CguRegressor;
using testing::code_of;

TEST(Cgu, ForwardUnderUnitInitialization) {
  const CguUnit ones;
  EXPECT_NEAR(cgu_forward(ones, 1.0, 0.0), 2.0 / (1.0 + std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(cgu_forward(ones, 1.0, 0.0), 1.462117, 1e-6);
  EXPECT_EQ(cgu_forward(ones, -2.0, 10.0), 0.0);
  EXPECT_NEAR(cgu_forward(ones, 0.0, 0.0), 0.731059, 1e-6);
}

TEST(Regressor, LayerShapes) {
  EXPECT_EQ(R::kUnits, 38);
  EXPECT_EQ(R::kHidden, 19);
  EXPECT_EQ(R::kNumParameters, 38u * 4 + 19 * 38 + 19 + 19 * 19 + 19 + 3 * 19 + 3);
  const R net;
  for (int j = 0; j < R::kUnits; ++j) {
    const auto u = net.unit(j);
    EXPECT_EQ(u.a, 1.0);
    EXPECT_EQ(u.b, 1.0);
    EXPECT_EQ(u.p, 1.0);
    EXPECT_EQ(u.q, 1.0);
  }
  EXPECT_EQ(net.l2_cgu, 1e-3);
  EXPECT_EQ(net.l2_fc, 1e-4);
}

TEST(Regressor, ZeroWeightsGiveZeroGazeAndHalfSigma) {
  Rng rng(81);
  const auto out = forward(R{}, testing::random_feature(rng));
  EXPECT_EQ(out.gaze2d, Vec2::Zero());
  EXPECT_EQ(out.sigma, 0.5);
}

TEST(Regressor, ForwardMatchesStraightLineOracle) {
  Rng rng(82);
  for (int t = 0; t < 20; ++t) {
    const auto net = testing::random_regressor(rng);
    for (int s = 0; s < 10; ++s) {
      const auto fv = testing::raw_feature(rng);
      const auto got = forward(net, fv);
      const auto want = oracle::straight_line_forward(net, fv);
      EXPECT_NEAR((got.gaze2d - want.gaze2d).norm(), 0.0, 1e-12 * (1 + want.gaze2d.norm()));
      EXPECT_NEAR(got.sigma, want.sigma, 1e-14);
      EXPECT_GT(got.sigma, 0.0);
      EXPECT_LT(got.sigma, 1.0);
    }
  }
}

TEST(Regressor, ForwardIsReproducible) {
  Rng rng(83);
  const auto net = R::initialized(4);
  const auto fv = testing::random_feature(rng);
  const auto a = forward(net, fv);
  const auto b = forward(net, fv);
  EXPECT_EQ(a.gaze2d, b.gaze2d);
  EXPECT_EQ(a.sigma, b.sigma);
}

R zero_net() {
  R net;
  for (double& p : net.parameters()) p = 0.0;
  return net;
}

TEST(Loss, PerfectPredictionWithZeroWeightsIsZero) {
  Rng rng(84);
  const std::vector<RegressionSample> batch = {{testing::random_feature(rng), Vec2::Zero()},
                                               {testing::random_feature(rng), Vec2::Zero()}};
  EXPECT_EQ(loss(zero_net(), batch), 0.0);
}

TEST(Loss, SingleSampleThreeFourFive) {
  Rng rng(85);
  R net = zero_net();
  net.l2_cgu = 0.0;
  net.l2_fc = 0.0;
  const std::vector<RegressionSample> batch = {{testing::random_feature(rng), Vec2(-3, 4)}};
  EXPECT_NEAR(loss(net, batch), std::sqrt(25.0 / 2.0), 1e-15);
  EXPECT_NEAR(loss(net, batch), 3.535534, 1e-6);
}

TEST(Loss, MatchesOracleOnRandomBatches) {
  Rng rng(86);
  for (int t = 0; t < 10; ++t) {
    const auto net = testing::random_regressor(rng);
    std::vector<RegressionSample> batch;
    for (int i = 0; i < 7; ++i) {
      batch.push_back({testing::raw_feature(rng), Vec2(rng.normal(0, 20), rng.normal(0, 20))});
    }
    const double want = oracle::straight_line_loss(net, batch);
    EXPECT_NEAR(loss(net, batch), want, 1e-12 * want);
    const auto terms = loss_terms(net, batch);
    EXPECT_NEAR(terms.total(), terms.data + terms.penalty, 0.0);
  }
}

TEST(Loss, EmptyBatch) {
  EXPECT_EQ(code_of([] { loss(R{}, {}); }), ErrorCode::kEmptyBatch);
  EXPECT_EQ(code_of([] { backward(R{}, {}); }), ErrorCode::kEmptyBatch);
}

TEST(Backward, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = testing::regressor_gradient_check(seed);
    EXPECT_LT(r.max_relative_error, 1e-5) << "seed " << seed << " index " << r.worst_index;
  }
}

TEST(Backward, DeadUnitGetsNoCoordinateGradient) {
  Rng rng(87);
  auto net = testing::random_regressor(rng);
  net.set_unit(5, {0.0, -1.0, 1.0, 0.0});  // a v + b = -1 for every input
  std::vector<RegressionSample> batch;
  for (int i = 0; i < 5; ++i) {
    batch.push_back({testing::raw_feature(rng), Vec2(rng.normal(0, 9), rng.normal(0, 9))});
  }
  net.l2_cgu = 0.0;
  const auto g = backward(net, batch);
  EXPECT_EQ(g[R::kCguOffset + 4 * 5 + 0], 0.0);
  EXPECT_EQ(g[R::kCguOffset + 4 * 5 + 1], 0.0);
  EXPECT_EQ(g[R::kCguOffset + 4 * 5 + 2], 0.0);  // the gate multiplies zero
}

// g(lambda) - g(0) is the penalty gradient: 2 lambda w on CGU scalars and on
// the FC1/FC2 weights, nothing on the output layer or any bias.
TEST(Backward, PenaltyDecomposition) {
  Rng rng(88);
  auto net = testing::random_regressor(rng);
  std::vector<RegressionSample> batch;
  for (int i = 0; i < 4; ++i) {
    batch.push_back({testing::raw_feature(rng), Vec2(rng.normal(0, 9), rng.normal(0, 9))});
  }
  auto with = [&](double cgu, double fc) {
    auto copy = net;
    copy.l2_cgu = cgu;
    copy.l2_fc = fc;
    return backward(copy, batch);
  };
  const auto g0 = with(0.0, 0.0);
  const auto g1 = with(1e-3, 1e-4);
  const auto g2 = with(2e-3, 2e-4);
  const auto w = net.parameters();
  for (std::size_t i = 0; i < R::kNumParameters; ++i) {
    const double part1 = g1[i] - g0[i];
    const double part2 = g2[i] - g0[i];
    EXPECT_NEAR(part2, 2.0 * part1, 1e-14 * (1 + std::abs(part2)));
    double expected = 0.0;
    if (i < R::kW1Offset) {
      expected = 2e-3 * w[i];
    } else if ((i >= R::kW1Offset && i < R::kB1Offset) || (i >= R::kW2Offset && i < R::kB2Offset)) {
      expected = 2e-4 * w[i];
    }
    EXPECT_NEAR(part1, expected, 1e-15 + 1e-12 * std::abs(g1[i])) << i;
  }
}

TEST(Backward, SigmaOutputReceivesNoDataGradient) {
  Rng rng(89);
  const auto net = testing::random_regressor(rng);
  std::vector<RegressionSample> batch = {{testing::raw_feature(rng), Vec2(10, -10)}};
  const auto g = backward(net, batch);
  EXPECT_EQ(g[R::kB3Offset + 2], 0.0);
  for (int j = 0; j < R::kHidden; ++j) {
    EXPECT_EQ(g[R::kW3Offset + 2 * R::kHidden + static_cast<std::size_t>(j)], 0.0);
  }
}

std::vector<RegressionSample> workspace_samples(int n, std::uint64_t seed) {
  SceneConfig scene;
  scene.counts = {0, 0, 0, n};
  scene.seed = seed;
  std::vector<RegressionSample> out;
  for (const auto& f : generate_dataset(scene)) {
    out.push_back({build_feature(f),
                   annotate_gaze(f, *f.target_ccs, frame_depth(f, kDefaultDepth)).gaze2d});
  }
  return out;
}

TEST(Train, MemorizesSingleSample) {
  Rng rng(90);
  const std::vector<RegressionSample> one = {{testing::random_feature(rng), Vec2(25, -40)}};
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.lr_decay = 1.0;
  cfg.lr0 = 1e-3;
  const auto result = train_regressor(one, cfg);
  EXPECT_LT(loss_terms(result.net, one).data, 1e-2);
}

TEST(Train, LearningRateScheduleAndLog) {
  const auto samples = workspace_samples(50, 1);
  TrainConfig cfg;
  cfg.epochs = 12;
  cfg.batch_size = 16;
  const auto result = train_regressor(samples, cfg);
  ASSERT_EQ(result.log.size(), 12u);
  double lr = 0.05;
  for (int e = 0; e < 12; ++e) {
    EXPECT_EQ(result.log[static_cast<std::size_t>(e)].epoch, e);
    EXPECT_NEAR(result.log[static_cast<std::size_t>(e)].learning_rate, 0.05 * std::pow(0.9, e),
                1e-15);
    EXPECT_EQ(result.log[static_cast<std::size_t>(e)].learning_rate, lr);
    EXPECT_TRUE(std::isfinite(result.log[static_cast<std::size_t>(e)].loss));
    lr *= 0.9;
  }
  EXPECT_EQ(result.net.train_config, cfg);
}

TEST(Train, SameSeedSameBytes) {
  const auto samples = workspace_samples(60, 2);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 25;
  cfg.seed = 9;
  EXPECT_EQ(serialize_regressor(train_regressor(samples, cfg).net),
            serialize_regressor(train_regressor(samples, cfg).net));
}

TEST(Train, BeatsTheMeanPredictor) {
  const auto samples = workspace_samples(400, 3);
  const auto result = train_regressor(samples, TrainConfig{});
  Vec2 mean = Vec2::Zero();
  for (const auto& s : samples) mean += s.target;
  mean /= static_cast<double>(samples.size());
  double model_sq = 0.0, mean_sq = 0.0;
  for (const auto& s : samples) {
    model_sq += (forward(result.net, s.features).gaze2d - s.target).squaredNorm();
    mean_sq += (mean - s.target).squaredNorm();
  }
  EXPECT_LT(model_sq, mean_sq);
}

// The default schedule decays the learning rate to ~1e-3 of lr0 by epoch 65,
// which stops short of this fit (ratio ~0.41). A gentler decay reaches it.
TEST(Train, FitsLargeWorkspaceSetToAThirdOfTheMeanPredictor) {
  const auto samples = workspace_samples(2000, 4);
  TrainConfig config;
  config.epochs = 300;
  config.batch_size = 32;
  config.lr0 = 0.005;
  config.lr_decay = 0.995;
  const auto result = train_regressor(samples, config);
  Vec2 mean = Vec2::Zero();
  for (const auto& s : samples) mean += s.target;
  mean /= static_cast<double>(samples.size());
  double model_sq = 0.0, mean_sq = 0.0;
  for (const auto& s : samples) {
    model_sq += (forward(result.net, s.features).gaze2d - s.target).squaredNorm();
    mean_sq += (mean - s.target).squaredNorm();
  }
  EXPECT_LE(std::sqrt(model_sq / mean_sq), 1.0 / 3.0);
}

TEST(Train, NonFiniteLossNamesEpoch) {
  Rng rng(91);
  const std::vector<RegressionSample> samples = {
      {testing::random_feature(rng), Vec2(std::numeric_limits<double>::quiet_NaN(), 1)}};
  try {
    train_regressor(samples, TrainConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteLoss);
    EXPECT_NE(e.message().find("epoch 0"), std::string::npos);
  }
}

TEST(Train, ConfigValidation) {
  TrainConfig cfg;
  cfg.lr_decay = 1.5;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::kConfigError);
  cfg = {};
  cfg.batch_size = 0;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { train_regressor({}, TrainConfig{}); }), ErrorCode::kEmptyBatch);
}

TEST(Serialization, RoundTripsExactly) {
  Rng rng(92);
  auto net = testing::random_regressor(rng);
  net.train_config.seed = 0xfedcba9876543210ULL;
  net.train_config.epochs = 7;
  const std::string text = serialize_regressor(net);
  const auto back = parse_regressor(text);
  EXPECT_EQ(back, net);
  EXPECT_EQ(serialize_regressor(back), text);
  const auto path = std::filesystem::temp_directory_path() / "gazekit_regressor_test.cgu";
  save_regressor(net, path);
  EXPECT_EQ(load_regressor(path), net);
  std::filesystem::remove(path);
}

TEST(Serialization, RejectsDamagedText) {
  const std::string text = serialize_regressor(R::initialized(1));
  EXPECT_EQ(code_of([&] { parse_regressor(text.substr(0, text.size() - 40)); }),
            ErrorCode::kMalformedRecord);
  std::string reshaped = text;
  reshaped.replace(reshaped.find("fc1 19 38"), 9, "fc1 19 37");
  EXPECT_EQ(code_of([&] { parse_regressor(reshaped); }), ErrorCode::kMalformedRecord);
  EXPECT_EQ(code_of([] { load_regressor("/nonexistent/model.cgu"); }), ErrorCode::kModelMissing);
}

}  // namespace
}  // namespace gazekit
