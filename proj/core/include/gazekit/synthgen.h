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

#ifndef GAZEKIT_SYNTHGEN_H_
#define GAZEKIT_SYNTHGEN_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "gazekit/dataset.h"
#include "gazekit/geometry.h"

namespace gazekit {

// Rigid face model in a head-local frame that coincides with the camera frame
// when the subject looks straight into the camera from the origin: +x toward
// image right, +y down, +z away from the camera. Meters.
struct HeadModel {
  // Canonical keypoint order. Pupil entries hold the rest pose (looking
  // along -z) and are recomputed per frame from the eyeball model.
  std::array<Vec3, kNumKeypoints> points{};
  Vec3 eyeball_left = Vec3::Zero();   // subject's left, image right
  Vec3 eyeball_right = Vec3::Zero();
  double eyeball_radius = 0.012;

  static HeadModel standard();
  HeadModel scaled(double factor) const;
};

struct ClassCounts {
  int eye_contact = 350;
  int other = 250;
  int icub = 345;
  int workspace = 500;

  int total() const { return eye_contact + other + icub + workspace; }
  int of(GazeClass c) const;
};

struct SceneConfig {
  CameraIntrinsics camera;
  ClassCounts counts;
  int subjects = 24;
  double head_distance = 1.0;  // meters along the optical axis
  BoardLayout board = BoardLayout::standard();
  Pose board_pose = table_board_pose();           // board frame to camera frame
  std::vector<Vec3> robot_markers = body_markers();  // camera frame
  double pixel_noise_std = 1.0;     // pixels; 0 disables noise and dropout
  double confidence_tau = 15.0;     // pixels^2
  double eye_dropout_probability = 0.05;
  double head_follow = 0.7;       // share of the gaze rotation done by the head
  double head_jitter_deg = 2.0;
  double subject_bias_deg = 1.0;  // per-subject head orientation offset
  double subject_shape_jitter = 0.06;  // relative face scale spread
  std::uint64_t seed = 0;

  // Board flat on the table between subject and robot, origin marker on the
  // subject's side.
  static Pose table_board_pose();
  // Shoulders, chest and forearms of the robot.
  static std::vector<Vec3> body_markers();
  // Throws kConfigError.
  void validate() const;
};

struct SyntheticSample {
  KeypointFrame frame;
  std::array<Vec3, kNumKeypoints> points_ccs{};  // noiseless 3D keypoints
  Vec3 eyeball_left = Vec3::Zero();               // camera frame
  Vec3 eyeball_right = Vec3::Zero();
  Vec3 target = Vec3::Zero();
  // Unit vector from the backprojected 2D centroid (at the recorded depth)
  // toward the target.
  Vec3 gaze3d = Vec3::UnitZ();
  int target_marker = -1;  // board or robot marker index, -1 otherwise
};

// Frames come out grouped by class in the fixed class order; subjects cycle
// within each class. Frame ids are "s<subject>_<class>_<index>".
std::vector<SyntheticSample> generate_samples(const SceneConfig& config);
std::vector<KeypointFrame> generate_dataset(const SceneConfig& config);

struct SeparabilityReport {
  long frames = 0;  // labeled frames with a usable feature vector
  long correct = 0;
  double accuracy = 0.0;
  std::array<double, kNumClasses> per_class_recall{};
};

// Resubstitution accuracy of a nearest-class-centroid rule in feature space.
SeparabilityReport class_separability_report(std::span<const KeypointFrame> frames);

}  // namespace gazekit

#endif  // GAZEKIT_SYNTHGEN_H_
