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

#ifndef GAZEKIT_TESTS_SUPPORT_FIXTURES_H_
#define GAZEKIT_TESTS_SUPPORT_FIXTURES_H_

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "gazekit/dataset.h"
#include "gazekit/error.h"
#include "gazekit/features.h"
#include "gazekit/random.h"

namespace gazekit::testing {

// Error code thrown by `fn`, failing the test if nothing is thrown.
template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no gazekit::Error thrown";
  return ErrorCode::kInvalidArgument;
}

// All keypoints scattered around (320, 240) with confidences in (0.2, 1].
inline KeypointFrame random_frame(Rng& rng, const std::string& id = "f",
                                  const std::string& subject = "s00") {
  KeypointFrame f;
  f.frame_id = id;
  f.subject_id = subject;
  for (auto& kp : f.keypoints) {
    kp.x = 320.0 + rng.normal(0.0, 40.0);
    kp.y = 240.0 + rng.normal(0.0, 40.0);
    kp.k = rng.uniform(0.2, 1.0);
  }
  return f;
}

inline FeatureVector random_feature(Rng& rng) {
  return build_feature(random_frame(rng));
}

}  // namespace gazekit::testing

#endif  // GAZEKIT_TESTS_SUPPORT_FIXTURES_H_
