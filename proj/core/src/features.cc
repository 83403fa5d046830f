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

#include "gazekit/error.h"

namespace gazekit {

FeatureVector build_feature(const KeypointFrame& frame) {
  return build_feature(std::span<const Keypoint, kNumKeypoints>(frame.keypoints));
}

FeatureVector build_feature(std::span<const Keypoint, kNumKeypoints> keypoints) {
  double cx = 0.0;
  double cy = 0.0;
  int count = 0;
  for (const Keypoint& kp : keypoints) {
    if (!kp.valid()) continue;
    cx += kp.x;
    cy += kp.y;
    ++count;
  }
  if (count == 0) {
    throw Error(ErrorCode::kNoValidKeypoints, "no keypoint with k > 0");
  }
  cx /= count;
  cy /= count;

  double scale = 0.0;
  for (const Keypoint& kp : keypoints) {
    if (!kp.valid()) continue;
    scale = std::max(scale, std::hypot(kp.x - cx, kp.y - cy));
  }
  if (scale < 1e-9) {
    throw Error(ErrorCode::kDegenerateGeometry,
                "valid keypoints collapse onto their centroid");
  }

  FeatureVector fv;
  for (int i = 0; i < kNumKeypoints; ++i) {
    const Keypoint& kp = keypoints[static_cast<std::size_t>(i)];
    if (kp.valid()) {
      fv.set(i, (kp.x - cx) / scale, (kp.y - cy) / scale, kp.k);
    } else {
      fv.set(i, 0.0, 0.0, kp.k);
    }
  }
  return fv;
}

FeatureVector rotate_feature(const FeatureVector& fv, double angle_deg) {
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(a);
  const double s = std::sin(a);
  FeatureVector out = fv;
  for (int i = 0; i < kNumKeypoints; ++i) {
    if (!fv.valid(i)) continue;
    out.set_xy(i, c * fv.x(i) - s * fv.y(i), s * fv.x(i) + c * fv.y(i));
  }
  return out;
}

FeatureVector zero_eye_keypoints(const FeatureVector& fv, bool zero_confidence) {
  FeatureVector out = fv;
  for (int i = kFirstEyeKeypoint; i < kFirstEyeKeypoint + kNumEyeKeypoints; ++i) {
    out.set(i, 0.0, 0.0, zero_confidence ? 0.0 : fv.k(i));
  }
  return out;
}

}  // namespace gazekit
