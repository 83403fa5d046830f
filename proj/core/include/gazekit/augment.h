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

#ifndef GAZEKIT_AUGMENT_H_
#define GAZEKIT_AUGMENT_H_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "gazekit/dataset.h"
#include "gazekit/features.h"

namespace gazekit {

// Training-set augmentation settings.
//
// For each rotation angle, two independent draws of
// floor(fraction * N_eye_contact) eye_contact samples are taken without
// replacement: one is rotated by +angle, the other by -angle. Every
// eye_contact and icub sample also gets one zeroed-eye copy. The regressor
// set gains floor(eye_zero_fraction_regressor * N) zeroed-eye copies.
struct AugmentPlan {
  std::vector<double> rotation_angles = {15.0, 30.0, 45.0, 60.0};
  std::vector<double> rotation_fractions = {0.05, 0.10, 0.10, 0.05};
  double eye_zero_fraction_regressor = 0.40;
  bool zero_eye_confidence = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LabeledFeature {
  FeatureVector features;
  GazeClass label = GazeClass::kOther;
};

struct RegressionSample {
  FeatureVector features;
  Vec2 target = Vec2::Zero();  // 2D gaze vector, pixels
};

// floor(fraction * n), robust to products that land a rounding error below an
// integer.
std::size_t fraction_count(double fraction, std::size_t n);

// Output order: originals, zeroed copies (input order), then rotated copies
// grouped by angle (+angle draw, then -angle draw).
std::vector<LabeledFeature> augment_classifier_set(
    std::span<const LabeledFeature> samples, const AugmentPlan& plan);

std::vector<RegressionSample> augment_regressor_set(
    std::span<const RegressionSample> samples, const AugmentPlan& plan);

// weight_c = N / (K * n_c) over the K classes present. Any class listed in
// `required` but absent throws kMissingClass.
std::map<GazeClass, double> class_weights(
    std::span<const GazeClass> labels,
    std::span<const GazeClass> required = {});

}  // namespace gazekit

#endif  // GAZEKIT_AUGMENT_H_
