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

#ifndef GAZEKIT_FEATURES_H_
#define GAZEKIT_FEATURES_H_

#include <array>
#include <span>

#include "gazekit/dataset.h"

namespace gazekit {

inline constexpr int kFeatureSize = 3 * kNumKeypoints;  // 57

// Flattened (x, y, k) triplets in canonical keypoint order.
class FeatureVector {
 public:
  FeatureVector() { values_.fill(0.0); }
  explicit FeatureVector(const std::array<double, kFeatureSize>& values)
      : values_(values) {}

  double x(int i) const { return values_[3 * i]; }
  double y(int i) const { return values_[3 * i + 1]; }
  double k(int i) const { return values_[3 * i + 2]; }
  void set(int i, double x, double y, double k) {
    values_[3 * i] = x;
    values_[3 * i + 1] = y;
    values_[3 * i + 2] = k;
  }
  void set_xy(int i, double x, double y) {
    values_[3 * i] = x;
    values_[3 * i + 1] = y;
  }
  bool valid(int i) const { return k(i) > 0.0; }

  std::span<const double, kFeatureSize> values() const { return values_; }
  std::span<double, kFeatureSize> values() { return values_; }
  double operator[](int i) const { return values_[i]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::array<double, kFeatureSize> values_;
};

// Centers the valid keypoints (k > 0) on their centroid and scales them so the
// farthest lies at distance 1. Missing keypoints become (0, 0, k).
// Throws kNoValidKeypoints, or kDegenerateGeometry when the farthest valid
// point is closer than 1e-9 px to the centroid.
FeatureVector build_feature(const KeypointFrame& frame);
FeatureVector build_feature(std::span<const Keypoint, kNumKeypoints> keypoints);

// Rotates every valid (x, y) about the origin by `angle_deg`
// (counterclockwise for positive angles in x-right / y-up axes).
FeatureVector rotate_feature(const FeatureVector& fv, double angle_deg);

// Sets the coordinates of the 16 eye keypoints to zero. Confidences are kept
// unless `zero_confidence` is set.
FeatureVector zero_eye_keypoints(const FeatureVector& fv,
                                 bool zero_confidence = false);

}  // namespace gazekit

#endif  // GAZEKIT_FEATURES_H_
