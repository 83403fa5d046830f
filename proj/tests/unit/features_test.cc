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

#include "gazekit/features.h"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "support/fixtures.h"

namespace gazekit {
namespace {

using testing::code_of;
using testing::random_feature;
using testing::random_frame;

TEST(BuildFeature, TwoPoints) {
  KeypointFrame f;
  f.keypoints[0] = {0, 0, 0.9};
  f.keypoints[5] = {2, 0, 0.4};
  const auto fv = build_feature(f);
  EXPECT_EQ(fv.x(0), -1.0);
  EXPECT_EQ(fv.y(0), 0.0);
  EXPECT_EQ(fv.k(0), 0.9);
  EXPECT_EQ(fv.x(5), 1.0);
  EXPECT_EQ(fv.k(5), 0.4);
  for (int i : {1, 2, 3, 4, 6, 18}) {
    EXPECT_EQ(fv.x(i), 0.0);
    EXPECT_EQ(fv.y(i), 0.0);
  }
}

TEST(BuildFeature, UnitCircleIsUnchanged) {
  KeypointFrame f;
  for (int i = 0; i < kNumKeypoints; ++i) {
    const double a = 2 * std::numbers::pi * i / kNumKeypoints;
    f.keypoints[static_cast<std::size_t>(i)] = {100 + std::cos(a), 100 + std::sin(a), 1.0};
  }
  const auto fv = build_feature(f);
  for (int i = 0; i < kNumKeypoints; ++i) {
    const double a = 2 * std::numbers::pi * i / kNumKeypoints;
    EXPECT_NEAR(fv.x(i), std::cos(a), 1e-12);
    EXPECT_NEAR(fv.y(i), std::sin(a), 1e-12);
  }
}

TEST(BuildFeature, MissingEyesUseThreeValidPoints) {
  // Nose (10, 0), ears (0, 0) and (20, 6): centroid (10, 2); the farthest
  // valid point is an ear at sqrt(116).
  KeypointFrame f;
  f.keypoints[0] = {10, 0, 1.0};
  f.keypoints[1] = {0, 0, 0.8};
  f.keypoints[2] = {20, 6, 0.6};
  for (int i = kFirstEyeKeypoint; i < kNumKeypoints; ++i) {
    f.keypoints[static_cast<std::size_t>(i)] = {500, 500, 0.0};
  }
  const auto fv = build_feature(f);
  const double s = std::sqrt(116.0);
  EXPECT_NEAR(fv.x(0), 0.0, 1e-15);
  EXPECT_NEAR(fv.y(0), -2.0 / s, 1e-15);
  EXPECT_NEAR(fv.x(1), -10.0 / s, 1e-15);
  EXPECT_NEAR(fv.y(1), -2.0 / s, 1e-15);
  EXPECT_NEAR(fv.x(2), 10.0 / s, 1e-15);
  EXPECT_NEAR(fv.y(2), 4.0 / s, 1e-15);
  for (int i = kFirstEyeKeypoint; i < kNumKeypoints; ++i) {
    EXPECT_EQ(fv.x(i), 0.0);
    EXPECT_EQ(fv.y(i), 0.0);
    EXPECT_EQ(fv.k(i), 0.0);
  }
}

TEST(BuildFeature, Errors) {
  KeypointFrame none;
  EXPECT_EQ(code_of([&] { build_feature(none); }), ErrorCode::kNoValidKeypoints);
  KeypointFrame coincident;
  coincident.keypoints[0] = {5, 5, 1};
  coincident.keypoints[1] = {5, 5, 1};
  EXPECT_EQ(code_of([&] { build_feature(coincident); }), ErrorCode::kDegenerateGeometry);
  KeypointFrame single;
  single.keypoints[3] = {5, 5, 1};
  EXPECT_EQ(code_of([&] { build_feature(single); }), ErrorCode::kDegenerateGeometry);
}

TEST(BuildFeature, FarthestValidPointHasUnitNorm) {
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    auto f = random_frame(rng);
    f.keypoints[rng.index(kNumKeypoints)].k = 0.0;
    const auto fv = build_feature(f);
    double max_norm = 0.0, cx = 0.0, cy = 0.0;
    for (int i = 0; i < kNumKeypoints; ++i) {
      if (!fv.valid(i)) continue;
      max_norm = std::max(max_norm, std::hypot(fv.x(i), fv.y(i)));
      cx += fv.x(i);
      cy += fv.y(i);
    }
    EXPECT_NEAR(max_norm, 1.0, 1e-15);
    EXPECT_NEAR(cx, 0.0, 1e-12);
    EXPECT_NEAR(cy, 0.0, 1e-12);
    for (int i = 0; i < kNumKeypoints; ++i) {
      EXPECT_EQ(fv.k(i), f.keypoints[static_cast<std::size_t>(i)].k);
    }
  }
}

TEST(BuildFeature, TranslationAndScaleInvariant) {
  Rng rng(32);
  for (int t = 0; t < 200; ++t) {
    const auto f = random_frame(rng);
    auto g = f;
    const double a = rng.uniform(0.1, 10.0);
    const double bx = rng.uniform(-500, 500), by = rng.uniform(-500, 500);
    for (auto& kp : g.keypoints) {
      kp.x = a * kp.x + bx;
      kp.y = a * kp.y + by;
    }
    const auto p = build_feature(f);
    const auto q = build_feature(g);
    for (int i = 0; i < kFeatureSize; ++i) EXPECT_NEAR(p[i], q[i], 1e-12) << i;
  }
}

TEST(RotateFeature, QuarterTurn) {
  FeatureVector fv;
  fv.set(0, 1, 0, 1);
  const auto r = rotate_feature(fv, 90);
  EXPECT_NEAR(r.x(0), 0.0, 1e-15);
  EXPECT_NEAR(r.y(0), 1.0, 1e-15);
  EXPECT_EQ(r.k(0), 1.0);
}

TEST(RotateFeature, ZeroAngleIsIdentity) {
  Rng rng(33);
  const auto fv = random_feature(rng);
  EXPECT_EQ(rotate_feature(fv, 0.0), fv);
}

TEST(RotateFeature, InverseRestores) {
  Rng rng(34);
  for (int t = 0; t < 50; ++t) {
    const auto fv = random_feature(rng);
    const auto back = rotate_feature(rotate_feature(fv, 30.0), -30.0);
    for (int i = 0; i < kFeatureSize; ++i) EXPECT_NEAR(back[i], fv[i], 1e-12);
  }
}

TEST(RotateFeature, InvalidPointsStayAtOrigin) {
  FeatureVector fv;
  fv.set(0, 1, 0, 1);
  fv.set(1, 0, 0, 0);
  const auto r = rotate_feature(fv, 45);
  EXPECT_EQ(r.x(1), 0.0);
  EXPECT_EQ(r.y(1), 0.0);
}

TEST(RotateFeature, PreservesPairwiseDistances) {
  Rng rng(35);
  for (int t = 0; t < 50; ++t) {
    const auto fv = random_feature(rng);
    const auto r = rotate_feature(fv, rng.uniform(-180, 180));
    for (int i = 0; i < kNumKeypoints; ++i) {
      for (int j = i + 1; j < kNumKeypoints; ++j) {
        EXPECT_NEAR(std::hypot(r.x(i) - r.x(j), r.y(i) - r.y(j)),
                    std::hypot(fv.x(i) - fv.x(j), fv.y(i) - fv.y(j)), 1e-12);
      }
    }
  }
}

TEST(ZeroEyes, ClearsOnlyEyeCoordinates) {
  Rng rng(36);
  const auto fv = random_feature(rng);
  const auto z = zero_eye_keypoints(fv);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(z.x(i), fv.x(i));
    EXPECT_EQ(z.y(i), fv.y(i));
    EXPECT_EQ(z.k(i), fv.k(i));
  }
  for (int i = kFirstEyeKeypoint; i < kNumKeypoints; ++i) {
    EXPECT_EQ(z.x(i), 0.0);
    EXPECT_EQ(z.y(i), 0.0);
    EXPECT_EQ(z.k(i), fv.k(i));
  }
  int changed = 0;
  for (int i = 0; i < kFeatureSize; ++i) changed += z[i] != fv[i];
  EXPECT_LE(changed, 32);
}

TEST(ZeroEyes, Idempotent) {
  Rng rng(37);
  const auto once = zero_eye_keypoints(random_feature(rng));
  EXPECT_EQ(zero_eye_keypoints(once), once);
}

TEST(ZeroEyes, OptionallyClearsConfidence) {
  Rng rng(38);
  const auto z = zero_eye_keypoints(random_feature(rng), true);
  for (int i = kFirstEyeKeypoint; i < kNumKeypoints; ++i) EXPECT_EQ(z.k(i), 0.0);
  EXPECT_GT(z.k(0), 0.0);
}

}  // namespace
}  // namespace gazekit
