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

#include "gazekit/synthgen.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>

#include "gazekit/error.h"
#include "gazekit/features.h"
#include "gazekit/random.h"

namespace gazekit {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Subject {
  std::string id;
  double scale = 1.0;
  Vec3 position_offset = Vec3::Zero();
  double yaw_bias = 0.0;
  double pitch_bias = 0.0;
};

// Yaw about +y and pitch about +x such that rotation(yaw, pitch) * (0, 0, -1)
// equals the unit vector v. Positive pitch looks down.
struct Angles {
  double yaw = 0.0;
  double pitch = 0.0;
};

Angles angles_of(const Vec3& v) {
  const Vec3 u = v.normalized();
  return {std::atan2(-u.x(), -u.z()), std::asin(std::clamp(u.y(), -1.0, 1.0))};
}

Vec3 direction_of(const Angles& a) {
  return {-std::sin(a.yaw) * std::cos(a.pitch), std::sin(a.pitch),
          -std::cos(a.yaw) * std::cos(a.pitch)};
}

Mat3 head_rotation(const Angles& a, double roll) {
  return (Eigen::AngleAxisd(a.yaw, Vec3::UnitY()) *
          Eigen::AngleAxisd(a.pitch, Vec3::UnitX()) *
          Eigen::AngleAxisd(roll, Vec3::UnitZ()))
      .toRotationMatrix();
}

std::vector<Subject> draw_subjects(const SceneConfig& cfg, Rng& rng) {
  std::vector<Subject> subjects;
  for (int s = 0; s < cfg.subjects; ++s) {
    Subject sub;
    char id[16];
    std::snprintf(id, sizeof(id), "s%02d", s);
    sub.id = id;
    sub.scale = std::clamp(1.0 + rng.normal(0.0, cfg.subject_shape_jitter), 0.8, 1.2);
    sub.position_offset = Vec3(rng.normal(0.0, 0.04), rng.normal(0.0, 0.03),
                               rng.normal(0.0, 0.05));
    sub.yaw_bias = rng.normal(0.0, cfg.subject_bias_deg) * kDeg;
    sub.pitch_bias = rng.normal(0.0, cfg.subject_bias_deg) * kDeg;
    subjects.push_back(sub);
  }
  return subjects;
}

Vec3 draw_target(const SceneConfig& cfg, GazeClass label, const Vec3& eyes,
                 Rng& rng, int* marker) {
  *marker = -1;
  switch (label) {
    case GazeClass::kEyeContact:
      return Vec3::Zero();
    case GazeClass::kIcub: {
      *marker = static_cast<int>(rng.index(cfg.robot_markers.size()));
      return cfg.robot_markers[static_cast<std::size_t>(*marker)];
    }
    case GazeClass::kWorkspace: {
      const std::size_t i = rng.index(cfg.board.ids.size());
      *marker = cfg.board.ids[i];
      return apply_pose(cfg.board_pose, board_marker_point(cfg.board, *marker));
    }
    case GazeClass::kOther: {
      Angles a;
      if (rng.uniform() < 0.5) {
        const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
        a.yaw = side * rng.uniform(40.0, 80.0) * kDeg;
        a.pitch = rng.uniform(-20.0, 20.0) * kDeg;
      } else {
        a.yaw = rng.uniform(-60.0, 60.0) * kDeg;
        a.pitch = -rng.uniform(25.0, 60.0) * kDeg;
      }
      // Angles are relative to the line of sight toward the camera.
      const Angles base = angles_of(-eyes);
      a.yaw += base.yaw;
      a.pitch += base.pitch;
      return eyes + rng.uniform(1.5, 3.0) * direction_of(a);
    }
  }
  return Vec3::Zero();
}

}  // namespace

HeadModel HeadModel::standard() {
  HeadModel h;
  h.eyeball_left = Vec3(0.032, 0.0, 0.0);
  h.eyeball_right = Vec3(-0.032, 0.0, 0.0);
  h.eyeball_radius = 0.012;
  h.points[0] = Vec3(0.0, 0.040, -0.045);   // nose
  h.points[1] = Vec3(0.075, 0.015, 0.080);  // ear_L
  h.points[2] = Vec3(-0.075, 0.015, 0.080);
  // Lid contour relative to the eyeball, x measured outward from the nose.
  const std::array<Vec3, 6> lid = {
      Vec3(0.015, 0.000, -0.006), Vec3(0.007, -0.006, -0.011),
      Vec3(-0.007, -0.006, -0.011), Vec3(-0.015, 0.001, -0.006),
      Vec3(-0.007, 0.005, -0.011), Vec3(0.007, 0.005, -0.011)};
  for (int side = 0; side < 2; ++side) {
    const double sx = side == 0 ? 1.0 : -1.0;
    const Vec3& center = side == 0 ? h.eyeball_left : h.eyeball_right;
    const int base = kFirstEyeKeypoint + 8 * side;
    for (int i = 0; i < 6; ++i) {
      const Vec3& o = lid[static_cast<std::size_t>(i)];
      h.points[static_cast<std::size_t>(base + i)] = center + Vec3(sx * o.x(), o.y(), o.z());
    }
    h.points[static_cast<std::size_t>(base + 6)] =
        center + Vec3(0.0, 0.0, -h.eyeball_radius);
    h.points[static_cast<std::size_t>(base + 7)] = center + Vec3(0.0, 0.0, -0.011);
  }
  return h;
}

HeadModel HeadModel::scaled(double factor) const {
  HeadModel h = *this;
  for (auto& p : h.points) p *= factor;
  h.eyeball_left *= factor;
  h.eyeball_right *= factor;
  h.eyeball_radius *= factor;
  return h;
}

int ClassCounts::of(GazeClass c) const {
  switch (c) {
    case GazeClass::kEyeContact: return eye_contact;
    case GazeClass::kOther: return other;
    case GazeClass::kIcub: return icub;
    case GazeClass::kWorkspace: return workspace;
  }
  return 0;
}

Pose SceneConfig::table_board_pose() {
  // Board +x toward image left, +y toward the robot, +z up.
  Mat3 rb;
  rb.col(0) = Vec3(-1.0, 0.0, 0.0);
  rb.col(1) = Vec3(0.0, 0.0, -1.0);
  rb.col(2) = Vec3(0.0, -1.0, 0.0);
  const Vec3 board_center(0.0, 0.45, 0.6);
  // Board center relative to the origin marker (row 3, column 1).
  const double pitch = BoardLayout::standard().pitch();
  const Vec3 center_bcs(1.0 * pitch, 1.5 * pitch, 0.0);
  return Pose::from(rotation_vector_from_matrix(rb), board_center - rb * center_bcs);
}

std::vector<Vec3> SceneConfig::body_markers() {
  return {
      Vec3(0.16, 0.18, 0.06),   // left shoulder
      Vec3(-0.16, 0.18, 0.06),  // right shoulder
      Vec3(0.0, 0.28, 0.08),    // chest
      Vec3(0.24, 0.36, 0.22),   // left forearm
      Vec3(-0.24, 0.36, 0.22),  // right forearm
  };
}

void SceneConfig::validate() const {
  const auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kConfigError, what);
  };
  try {
    camera.validate();
    board.validate();
  } catch (const Error& e) {
    fail(e.message());
  }
  if (counts.eye_contact < 0 || counts.other < 0 || counts.icub < 0 ||
      counts.workspace < 0) {
    fail("class counts must be non-negative");
  }
  if (subjects < 1) fail("at least one subject is required");
  if (!(head_distance > 0.0)) fail("head_distance must be positive");
  if (!(pixel_noise_std >= 0.0)) fail("pixel_noise_std must be non-negative");
  if (!(confidence_tau > 0.0)) fail("confidence_tau must be positive");
  if (!(eye_dropout_probability >= 0.0 && eye_dropout_probability <= 1.0)) {
    fail("eye_dropout_probability must lie in [0, 1]");
  }
  if (!(head_follow >= 0.0 && head_follow <= 1.0)) fail("head_follow must lie in [0, 1]");
  if (!(head_jitter_deg >= 0.0) || !(subject_bias_deg >= 0.0) ||
      !(subject_shape_jitter >= 0.0)) {
    fail("jitter parameters must be non-negative");
  }
  if (counts.icub > 0 && robot_markers.empty()) {
    fail("icub samples need at least one robot marker");
  }
  for (const Vec3& m : robot_markers) {
    if (!(m.z() > 0.0)) fail("robot markers must lie in front of the camera");
  }
}

std::vector<SyntheticSample> generate_samples(const SceneConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::vector<Subject> subjects = draw_subjects(cfg, rng);
  const HeadModel model = HeadModel::standard();
  const bool noisy = cfg.pixel_noise_std > 0.0;
  const CameraIntrinsics& cam = cfg.camera;

  std::vector<SyntheticSample> out;
  out.reserve(static_cast<std::size_t>(cfg.counts.total()));
  for (GazeClass label : kClassOrder) {
    const int count = cfg.counts.of(label);
    for (int i = 0; i < count; ++i) {
      const Subject& sub = subjects[static_cast<std::size_t>(i % cfg.subjects)];
      const HeadModel head = model.scaled(sub.scale);
      SyntheticSample s;

      const Vec3 eyes = Vec3(0.0, 0.0, cfg.head_distance) + sub.position_offset +
                        Vec3(rng.normal(0.0, 0.02), rng.normal(0.0, 0.02),
                             rng.normal(0.0, 0.03));
      s.target = draw_target(cfg, label, eyes, rng, &s.target_marker);

      const Angles toward_camera = angles_of(-eyes);
      const Angles gaze = angles_of(s.target - eyes);
      Angles pose;
      pose.yaw = toward_camera.yaw + cfg.head_follow * (gaze.yaw - toward_camera.yaw) +
                 sub.yaw_bias + rng.normal(0.0, cfg.head_jitter_deg) * kDeg;
      pose.pitch = toward_camera.pitch +
                   cfg.head_follow * (gaze.pitch - toward_camera.pitch) +
                   sub.pitch_bias + rng.normal(0.0, cfg.head_jitter_deg) * kDeg;
      const double roll = rng.normal(0.0, 0.5 * cfg.head_jitter_deg) * kDeg;
      const Mat3 rot = head_rotation(pose, roll);

      for (int k = 0; k < kNumKeypoints; ++k) {
        s.points_ccs[static_cast<std::size_t>(k)] =
            eyes + rot * head.points[static_cast<std::size_t>(k)];
      }
      s.eyeball_left = eyes + rot * head.eyeball_left;
      s.eyeball_right = eyes + rot * head.eyeball_right;
      const auto pupil = [&](const Vec3& center) -> Vec3 {
        return center + head.eyeball_radius * (s.target - center).normalized();
      };
      s.points_ccs[kFirstEyeKeypoint + 6] = pupil(s.eyeball_left);
      s.points_ccs[kFirstEyeKeypoint + 8 + 6] = pupil(s.eyeball_right);

      KeypointFrame& f = s.frame;
      char id[64];
      std::snprintf(id, sizeof(id), "%s_%s_%04d", sub.id.c_str(),
                    std::string(class_name(label)).c_str(), i);
      f.frame_id = id;
      f.subject_id = sub.id;
      f.camera = cam;
      f.label = label;
      f.target_ccs = s.target;

      for (int k = 0; k < kNumKeypoints; ++k) {
        const Vec2 px = project(s.points_ccs[static_cast<std::size_t>(k)], cam);
        Keypoint kp{px.x(), px.y(), 1.0};
        if (noisy) {
          const double sd = cfg.pixel_noise_std * std::exp(rng.normal(0.0, 0.4));
          const Vec2 n(rng.normal(0.0, sd), rng.normal(0.0, sd));
          kp.x += n.x();
          kp.y += n.y();
          kp.k = std::clamp(std::exp(-n.squaredNorm() / cfg.confidence_tau), 0.0, 1.0);
        }
        f.keypoints[static_cast<std::size_t>(k)] = kp;
      }
      if (noisy && rng.uniform() < cfg.eye_dropout_probability) {
        const int first = kFirstEyeKeypoint + (rng.uniform() < 0.5 ? 0 : 8);
        for (int k = first; k < first + 8; ++k) f.keypoints[static_cast<std::size_t>(k)] = {};
      }

      // Depth of the 3D centroid of the emitted points; gaze from the 2D
      // centroid lifted to that depth.
      Vec3 c3 = Vec3::Zero();
      Vec2 c2 = Vec2::Zero();
      int valid = 0;
      for (int k = 0; k < kNumKeypoints; ++k) {
        const Keypoint& kp = f.keypoints[static_cast<std::size_t>(k)];
        if (!kp.valid()) continue;
        c3 += s.points_ccs[static_cast<std::size_t>(k)];
        c2 += Vec2(kp.x, kp.y);
        ++valid;
      }
      c3 /= valid;
      c2 /= valid;
      f.centroid_depth = c3.z();
      const Vec3 lifted((c2.x() - cam.cx) / cam.fx * c3.z(),
                        (c2.y() - cam.cy) / cam.fy * c3.z(), c3.z());
      s.gaze3d = (s.target - lifted).normalized();
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<KeypointFrame> generate_dataset(const SceneConfig& config) {
  std::vector<KeypointFrame> frames;
  for (auto& s : generate_samples(config)) frames.push_back(std::move(s.frame));
  return frames;
}

SeparabilityReport class_separability_report(std::span<const KeypointFrame> frames) {
  std::vector<FeatureVector> features;
  std::vector<int> labels;
  for (const auto& f : frames) {
    if (!f.label) continue;
    try {
      features.push_back(build_feature(f));
      labels.push_back(class_index(*f.label));
    } catch (const Error&) {
    }
  }
  SeparabilityReport report;
  report.frames = static_cast<long>(features.size());
  if (features.empty()) return report;

  std::array<Eigen::Matrix<double, kFeatureSize, 1>, kNumClasses> centroid{};
  std::array<long, kNumClasses> count{};
  for (auto& c : centroid) c.setZero();
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    for (int d = 0; d < kFeatureSize; ++d) centroid[c][d] += features[i][d];
    ++count[c];
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (count[c] > 0) centroid[c] /= static_cast<double>(count[c]);
  }

  std::array<long, kNumClasses> hits{};
  for (std::size_t i = 0; i < features.size(); ++i) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      if (count[c] == 0) continue;
      double d = 0.0;
      for (int j = 0; j < kFeatureSize; ++j) {
        const double diff = features[i][j] - centroid[c][j];
        d += diff * diff;
      }
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    if (best == labels[i]) {
      ++report.correct;
      ++hits[static_cast<std::size_t>(best)];
    }
  }
  report.accuracy = static_cast<double>(report.correct) / static_cast<double>(report.frames);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    report.per_class_recall[c] =
        count[c] > 0 ? static_cast<double>(hits[c]) / static_cast<double>(count[c]) : 0.0;
  }
  return report;
}

}  // namespace gazekit
