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

#include "gazekit/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "gazekit/error.h"
#include "gazekit/random.h"

namespace gazekit {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<std::string_view, kNumKeypoints> kKeypointNames = {
    "nose",   "ear_L",  "ear_R",  "eyeL_0", "eyeL_1", "eyeL_2", "eyeL_3",
    "eyeL_4", "eyeL_5", "eyeL_6", "eyeL_7", "eyeR_0", "eyeR_1", "eyeR_2",
    "eyeR_3", "eyeR_4", "eyeR_5", "eyeR_6", "eyeR_7"};

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedRecord, what);
}

double number_at(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    malformed(std::string("missing or non-numeric '") + key + "'");
  }
  return it->get<double>();
}

void check_keys(const Json& obj, std::initializer_list<std::string_view> known,
                const char* where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      malformed(std::string("unknown member '") + key + "' in " + where);
    }
  }
}

CameraIntrinsics camera_from_json(const Json& j, bool strict) {
  if (!j.is_object()) malformed("'camera' must be an object");
  if (strict) check_keys(j, {"fx", "fy", "cx", "cy", "width", "height"}, "camera");
  CameraIntrinsics cam;
  cam.fx = number_at(j, "fx");
  cam.fy = number_at(j, "fy");
  cam.cx = number_at(j, "cx");
  cam.cy = number_at(j, "cy");
  cam.width = static_cast<int>(number_at(j, "width"));
  cam.height = static_cast<int>(number_at(j, "height"));
  try {
    cam.validate();
  } catch (const Error& e) {
    malformed(e.message());
  }
  return cam;
}

Json camera_to_json(const CameraIntrinsics& cam) {
  Json j;
  j["fx"] = cam.fx;
  j["fy"] = cam.fy;
  j["cx"] = cam.cx;
  j["cy"] = cam.cy;
  j["width"] = cam.width;
  j["height"] = cam.height;
  return j;
}

KeypointFrame frame_from_json(const Json& j, const JsonlOptions& options) {
  if (!j.is_object()) malformed("record must be a JSON object");
  KeypointFrame frame;
  static constexpr std::array<std::string_view, 7> kKnown = {
      "frame_id", "subject_id",  "camera",        "keypoints",
      "label",    "target_ccs", "centroid_depth"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKnown.begin(), kKnown.end(), key) != kKnown.end()) continue;
    if (options.strict) malformed("unknown member '" + key + "'");
    frame.extra_fields.emplace_back(key, value.dump());
  }

  const auto id = j.find("frame_id");
  const auto subject = j.find("subject_id");
  if (id == j.end() || !id->is_string()) malformed("missing 'frame_id'");
  if (subject == j.end() || !subject->is_string()) {
    malformed("missing 'subject_id'");
  }
  frame.frame_id = id->get<std::string>();
  frame.subject_id = subject->get<std::string>();

  const auto cam = j.find("camera");
  if (cam == j.end()) malformed("missing 'camera'");
  frame.camera = camera_from_json(*cam, options.strict);

  const auto kps = j.find("keypoints");
  if (kps == j.end() || !kps->is_array()) malformed("missing 'keypoints'");
  if (kps->size() != kNumKeypoints) {
    throw Error(ErrorCode::kWrongKeypointCount,
                "expected " + std::to_string(kNumKeypoints) + " keypoints, got " +
                    std::to_string(kps->size()));
  }
  for (int i = 0; i < kNumKeypoints; ++i) {
    const Json& kp = (*kps)[static_cast<std::size_t>(i)];
    if (!kp.is_object()) malformed("keypoint must be an object");
    if (options.strict) check_keys(kp, {"name", "x", "y", "k"}, "keypoint");
    const auto name = kp.find("name");
    if (name != kp.end() &&
        (!name->is_string() || name->get<std::string>() != kKeypointNames[i])) {
      malformed("keypoint " + std::to_string(i) + " should be named '" +
                std::string(kKeypointNames[i]) + "'");
    }
    Keypoint& out = frame.keypoints[static_cast<std::size_t>(i)];
    out.x = number_at(kp, "x");
    out.y = number_at(kp, "y");
    out.k = number_at(kp, "k");
    if (!(out.k >= 0.0 && out.k <= 1.0)) {
      malformed("keypoint confidence outside [0, 1]");
    }
  }

  if (const auto label = j.find("label"); label != j.end() && !label->is_null()) {
    if (!label->is_string()) malformed("'label' must be a string");
    const auto parsed = parse_class(label->get<std::string>());
    if (!parsed) malformed("unknown label '" + label->get<std::string>() + "'");
    frame.label = *parsed;
  }
  if (const auto t = j.find("target_ccs"); t != j.end() && !t->is_null()) {
    if (!t->is_array() || t->size() != 3) malformed("'target_ccs' must be [x,y,z]");
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
      const Json& c = (*t)[static_cast<std::size_t>(i)];
      if (!c.is_number()) malformed("'target_ccs' must be numeric");
      v[i] = c.get<double>();
    }
    frame.target_ccs = v;
  }
  if (const auto d = j.find("centroid_depth"); d != j.end() && !d->is_null()) {
    if (!d->is_number()) malformed("'centroid_depth' must be numeric");
    frame.centroid_depth = d->get<double>();
  }
  return frame;
}

Json frame_to_json(const KeypointFrame& frame) {
  Json j;
  j["frame_id"] = frame.frame_id;
  j["subject_id"] = frame.subject_id;
  j["camera"] = camera_to_json(frame.camera);
  Json kps = Json::array();
  for (int i = 0; i < kNumKeypoints; ++i) {
    const Keypoint& kp = frame.keypoints[static_cast<std::size_t>(i)];
    Json e;
    e["name"] = kKeypointNames[i];
    e["x"] = kp.x;
    e["y"] = kp.y;
    e["k"] = kp.k;
    kps.push_back(std::move(e));
  }
  j["keypoints"] = std::move(kps);
  if (frame.label) j["label"] = class_name(*frame.label);
  if (frame.target_ccs) {
    j["target_ccs"] = {frame.target_ccs->x(), frame.target_ccs->y(),
                       frame.target_ccs->z()};
  }
  if (frame.centroid_depth) j["centroid_depth"] = *frame.centroid_depth;
  for (const auto& [key, raw] : frame.extra_fields) {
    j[key] = Json::parse(raw);
  }
  return j;
}

}  // namespace

std::string_view class_name(GazeClass c) {
  switch (c) {
    case GazeClass::kEyeContact: return "eye_contact";
    case GazeClass::kOther: return "other";
    case GazeClass::kIcub: return "icub";
    case GazeClass::kWorkspace: return "workspace";
  }
  return "unknown";
}

std::optional<GazeClass> parse_class(std::string_view name) {
  for (GazeClass c : kClassOrder) {
    if (class_name(c) == name) return c;
  }
  return std::nullopt;
}

const std::array<std::string_view, kNumKeypoints>& canonical_keypoint_names() {
  return kKeypointNames;
}

bool operator==(const KeypointFrame& a, const KeypointFrame& b) {
  return a.frame_id == b.frame_id && a.subject_id == b.subject_id &&
         a.camera == b.camera && a.keypoints == b.keypoints &&
         a.label == b.label && a.target_ccs == b.target_ccs &&
         a.centroid_depth == b.centroid_depth &&
         a.extra_fields == b.extra_fields;
}

KeypointMapping KeypointMapping::openpose_body25_face70() {
  constexpr int kFace = 25;
  KeypointMapping m;
  m.source_index = {
      0,   // nose
      18,  // LEar
      17,  // REar
      // Subject's left eye: face 42..47, left pupil 69, body LEye 16.
      kFace + 42, kFace + 43, kFace + 44, kFace + 45, kFace + 46, kFace + 47,
      kFace + 69, 16,
      // Subject's right eye: face 36..41, right pupil 68, body REye 15.
      kFace + 36, kFace + 37, kFace + 38, kFace + 39, kFace + 40, kFace + 41,
      kFace + 68, 15};
  return m;
}

std::array<Keypoint, kNumKeypoints> remap_keypoints(
    std::span<const Keypoint> external, const KeypointMapping& mapping) {
  std::array<Keypoint, kNumKeypoints> out{};
  for (int i = 0; i < kNumKeypoints; ++i) {
    const int src = mapping.source_index[static_cast<std::size_t>(i)];
    if (src < 0 || static_cast<std::size_t>(src) >= external.size()) {
      throw Error(ErrorCode::kWrongKeypointCount,
                  "mapping index " + std::to_string(src) +
                      " outside the external keypoint list");
    }
    out[static_cast<std::size_t>(i)] = external[static_cast<std::size_t>(src)];
  }
  return out;
}

Vec2 face_centroid(const KeypointFrame& frame) {
  Vec2 sum = Vec2::Zero();
  int count = 0;
  for (const Keypoint& kp : frame.keypoints) {
    if (!kp.valid()) continue;
    sum += Vec2(kp.x, kp.y);
    ++count;
  }
  if (count == 0) {
    throw Error(ErrorCode::kNoValidKeypoints,
                "frame '" + frame.frame_id + "' has no keypoint with k > 0");
  }
  return sum / count;
}

GazeAnnotation annotate_gaze(const KeypointFrame& frame, const Vec3& target_ccs,
                             double depth) {
  GazeAnnotation out;
  out.centroid_px = face_centroid(frame);
  out.target_ccs = target_ccs;
  const Vec3 centroid = backproject(out.centroid_px, depth, frame.camera);
  const Vec3 offset = target_ccs - centroid;
  const double length = offset.norm();
  if (length < 1e-6) {
    throw Error(ErrorCode::kDegenerateTarget,
                "gaze target coincides with the head centroid in frame '" +
                    frame.frame_id + "'");
  }
  out.gaze3d = offset / length;
  const Vec3 tip = centroid + kGazeVersorLength * out.gaze3d;
  out.gaze2d = project(tip, frame.camera) - project(centroid, frame.camera);
  return out;
}

double frame_depth(const KeypointFrame& frame, double fallback) {
  return frame.centroid_depth.value_or(fallback);
}

SplitPlan split_by_subject(std::span<const KeypointFrame> frames, int k,
                           SplitRatio ratio, std::uint64_t seed) {
  if (k <= 0 || ratio.train <= 0 || ratio.test <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "split count and ratio parts must be positive");
  }
  std::set<std::string> unique;
  for (const auto& f : frames) unique.insert(f.subject_id);
  std::vector<std::string> subjects(unique.begin(), unique.end());
  const std::size_t n = subjects.size();
  if (n < 2) {
    throw Error(ErrorCode::kTooFewSubjects,
                "need at least two subjects, found " + std::to_string(n));
  }
  const double share =
      static_cast<double>(ratio.test) / static_cast<double>(ratio.train + ratio.test);
  const auto n_test = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(share * static_cast<double>(n))), 1,
      n - 1);

  SplitPlan plan;
  plan.k = k;
  plan.ratio = ratio;
  plan.seed = seed;
  Rng rng(seed);
  for (int s = 0; s < k; ++s) {
    std::vector<std::string> order = subjects;
    rng.shuffle(std::span<std::string>(order));
    SubjectSplit split;
    split.test_subjects.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train_subjects.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    std::sort(split.test_subjects.begin(), split.test_subjects.end());
    std::sort(split.train_subjects.begin(), split.train_subjects.end());
    plan.splits.push_back(std::move(split));
  }
  return plan;
}

std::vector<KeypointFrame> select_subjects(
    std::span<const KeypointFrame> frames,
    std::span<const std::string> subjects) {
  const std::set<std::string> wanted(subjects.begin(), subjects.end());
  std::vector<KeypointFrame> out;
  for (const auto& f : frames) {
    if (wanted.count(f.subject_id)) out.push_back(f);
  }
  return out;
}

KeypointFrame frame_from_json_text(std::string_view line,
                                   const JsonlOptions& options) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    malformed(std::string(e.what()));
  }
  return frame_from_json(j, options);
}

std::string frame_to_json_text(const KeypointFrame& frame) {
  return frame_to_json(frame).dump();
}

std::vector<KeypointFrame> read_jsonl(std::istream& in,
                                      const JsonlOptions& options) {
  std::vector<KeypointFrame> frames;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      frames.push_back(frame_from_json_text(line, options));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.message());
    }
  }
  return frames;
}

std::vector<KeypointFrame> read_jsonl(const std::filesystem::path& path,
                                      const JsonlOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  return read_jsonl(in, options);
}

void write_jsonl(std::ostream& out, std::span<const KeypointFrame> frames) {
  for (const auto& f : frames) out << frame_to_json_text(f) << '\n';
}

void write_jsonl(const std::filesystem::path& path,
                 std::span<const KeypointFrame> frames) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  write_jsonl(out, frames);
}

}  // namespace gazekit
