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

#ifndef GAZEKIT_DATASET_H_
#define GAZEKIT_DATASET_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gazekit/geometry.h"

namespace gazekit {

// The enumerator order is the fixed class order used for tie-breaking and in
// serialized models.
enum class GazeClass : int {
  kEyeContact = 0,
  kOther = 1,
  kIcub = 2,
  kWorkspace = 3,
};

inline constexpr int kNumClasses = 4;
inline constexpr std::array<GazeClass, kNumClasses> kClassOrder = {
    GazeClass::kEyeContact, GazeClass::kOther, GazeClass::kIcub,
    GazeClass::kWorkspace};

constexpr int class_index(GazeClass c) { return static_cast<int>(c); }
std::string_view class_name(GazeClass c);
std::optional<GazeClass> parse_class(std::string_view name);

inline constexpr int kNumKeypoints = 19;
inline constexpr int kFirstEyeKeypoint = 3;
inline constexpr int kNumEyeKeypoints = 16;

// Canonical keypoint order: nose, ear_L, ear_R, eyeL_0..7, eyeR_0..7.
// Per eye, points 0..5 trace the lid contour, 6 is the pupil and 7 is the
// coarse body-model eye point. L/R refer to the subject's own left/right.
const std::array<std::string_view, kNumKeypoints>& canonical_keypoint_names();

inline constexpr double kGazeVersorLength = 0.10;  // meters
inline constexpr double kDefaultDepth = 1.0;       // meters

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double k = 0.0;  // detector confidence; 0 marks a missing point

  bool valid() const { return k > 0.0; }
  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct KeypointFrame {
  std::string frame_id;
  std::string subject_id;
  CameraIntrinsics camera;
  std::array<Keypoint, kNumKeypoints> keypoints{};
  std::optional<GazeClass> label;
  std::optional<Vec3> target_ccs;
  std::optional<double> centroid_depth;
  // Unrecognized top-level record members, kept as (key, raw JSON text) in
  // input order so they survive a read/write cycle.
  std::vector<std::pair<std::string, std::string>> extra_fields;

  friend bool operator==(const KeypointFrame& a, const KeypointFrame& b);
};

// Maps an external pose-estimator keypoint list onto the canonical order.
struct KeypointMapping {
  std::array<int, kNumKeypoints> source_index{};

  // BODY_25 (indices 0..24) followed by the 70-point face model (25..94).
  // Eyes: six lid points, the face-model pupil, then the body-model eye.
  static KeypointMapping openpose_body25_face70();
};

std::array<Keypoint, kNumKeypoints> remap_keypoints(
    std::span<const Keypoint> external, const KeypointMapping& mapping);

struct GazeAnnotation {
  Vec2 gaze2d = Vec2::Zero();       // pixels, projected tip minus centroid
  Vec2 centroid_px = Vec2::Zero();  // pixels
  Vec3 gaze3d = Vec3::UnitZ();      // unit vector, camera frame
  Vec3 target_ccs = Vec3::Zero();   // meters, camera frame
};

// Mean pixel position of the keypoints with k > 0. Throws kNoValidKeypoints.
Vec2 face_centroid(const KeypointFrame& frame);

// Ground-truth 2D/3D gaze for a frame whose gaze target is known in the camera
// frame. The centroid is lifted to 3D at `depth`; the 3D gaze is the unit
// vector toward the target and the 2D gaze is the image of a 10 cm versor
// along it.
GazeAnnotation annotate_gaze(const KeypointFrame& frame, const Vec3& target_ccs,
                             double depth = kDefaultDepth);

// Depth recorded on the frame, or `fallback` if the frame carries none.
double frame_depth(const KeypointFrame& frame, double fallback);

struct SplitRatio {
  int train = 19;
  int test = 5;
};

struct SubjectSplit {
  std::vector<std::string> train_subjects;
  std::vector<std::string> test_subjects;
};

struct SplitPlan {
  int k = 0;
  SplitRatio ratio;
  std::uint64_t seed = 0;
  std::vector<SubjectSplit> splits;
};

// k independent random participant-wise partitions. Throws kTooFewSubjects
// with fewer than two distinct subjects.
SplitPlan split_by_subject(std::span<const KeypointFrame> frames, int k,
                           SplitRatio ratio, std::uint64_t seed);

std::vector<KeypointFrame> select_subjects(
    std::span<const KeypointFrame> frames,
    std::span<const std::string> subjects);

struct JsonlOptions {
  // Reject records carrying members outside the schema.
  bool strict = false;
};

// One frame per line. Errors carry the 1-based line number.
std::vector<KeypointFrame> read_jsonl(std::istream& in,
                                      const JsonlOptions& options = {});
std::vector<KeypointFrame> read_jsonl(const std::filesystem::path& path,
                                      const JsonlOptions& options = {});
void write_jsonl(std::ostream& out, std::span<const KeypointFrame> frames);
void write_jsonl(const std::filesystem::path& path,
                 std::span<const KeypointFrame> frames);

// Single-record codecs used by the stream functions.
KeypointFrame frame_from_json_text(std::string_view line,
                                   const JsonlOptions& options = {});
std::string frame_to_json_text(const KeypointFrame& frame);

}  // namespace gazekit

#endif  // GAZEKIT_DATASET_H_
