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

#include "gazekit/augment.h"

#include <cmath>

#include "gazekit/error.h"
#include "gazekit/random.h"

namespace gazekit {

void AugmentPlan::validate() const {
  if (rotation_angles.size() != rotation_fractions.size()) {
    throw Error(ErrorCode::kConfigError,
                "rotation_angles and rotation_fractions differ in length");
  }
  for (double a : rotation_angles) {
    if (!(a > 0.0)) {
      throw Error(ErrorCode::kConfigError, "rotation angles must be positive");
    }
  }
  for (double f : rotation_fractions) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw Error(ErrorCode::kConfigError, "rotation fractions must be in [0, 1]");
    }
  }
  if (!(eye_zero_fraction_regressor >= 0.0 && eye_zero_fraction_regressor <= 1.0)) {
    throw Error(ErrorCode::kConfigError,
                "eye_zero_fraction_regressor must be in [0, 1]");
  }
}

std::size_t fraction_count(double fraction, std::size_t n) {
  return static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(n) + 1e-9));
}

std::vector<LabeledFeature> augment_classifier_set(
    std::span<const LabeledFeature> samples, const AugmentPlan& plan) {
  plan.validate();
  std::vector<LabeledFeature> out(samples.begin(), samples.end());

  std::vector<std::size_t> eye_contact;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const GazeClass label = samples[i].label;
    if (label == GazeClass::kEyeContact) eye_contact.push_back(i);
    if (label == GazeClass::kEyeContact || label == GazeClass::kIcub) {
      out.push_back({zero_eye_keypoints(samples[i].features,
                                        plan.zero_eye_confidence),
                     label});
    }
  }

  Rng rng(plan.seed);
  for (std::size_t a = 0; a < plan.rotation_angles.size(); ++a) {
    const std::size_t n = fraction_count(plan.rotation_fractions[a], eye_contact.size());
    for (double sign : {1.0, -1.0}) {
      for (std::size_t pick : rng.sample_without_replacement(eye_contact.size(), n)) {
        const LabeledFeature& src = samples[eye_contact[pick]];
        out.push_back({rotate_feature(src.features, sign * plan.rotation_angles[a]),
                       src.label});
      }
    }
  }
  return out;
}

std::vector<RegressionSample> augment_regressor_set(
    std::span<const RegressionSample> samples, const AugmentPlan& plan) {
  plan.validate();
  std::vector<RegressionSample> out(samples.begin(), samples.end());
  Rng rng(plan.seed);
  const std::size_t n = fraction_count(plan.eye_zero_fraction_regressor, samples.size());
  for (std::size_t pick : rng.sample_without_replacement(samples.size(), n)) {
    out.push_back({zero_eye_keypoints(samples[pick].features,
                                      plan.zero_eye_confidence),
                   samples[pick].target});
  }
  return out;
}

std::map<GazeClass, double> class_weights(std::span<const GazeClass> labels,
                                          std::span<const GazeClass> required) {
  std::map<GazeClass, std::size_t> counts;
  for (GazeClass c : labels) ++counts[c];
  for (GazeClass c : required) {
    if (!counts.count(c)) {
      throw Error(ErrorCode::kMissingClass,
                  "class '" + std::string(class_name(c)) + "' has no samples");
    }
  }
  std::map<GazeClass, double> weights;
  const double total = static_cast<double>(labels.size());
  const double k = static_cast<double>(counts.size());
  for (const auto& [c, n] : counts) {
    weights[c] = total / (k * static_cast<double>(n));
  }
  return weights;
}

}  // namespace gazekit
