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

#include "gazekit/geometry.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include <Eigen/Geometry>

#include "gazekit/error.h"

namespace gazekit {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTieTolerance = 1e-12;
constexpr double kTangentTolerance = 1e-12;

Mat3 skew(const Vec3& v) {
  Mat3 k;
  k << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return k;
}

}  // namespace

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw Error(ErrorCode::kInvalidArgument,
                "principal point must lie inside the image");
  }
}

Pose Pose::from(const Vec3& r, const Vec3& t) {
  return Pose{canonicalize_rotation_vector(r), t};
}

Mat3 Pose::rotation() const { return rodrigues(r); }

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation();
  m.topRightCorner<3, 1>() = t;
  return m;
}

Vec3 canonicalize_rotation_vector(const Vec3& r) {
  const double theta = r.norm();
  if (theta == 0.0) return Vec3::Zero();
  Vec3 axis = r / theta;
  double angle = std::fmod(theta, 2.0 * kPi);
  if (angle > kPi) {
    angle = 2.0 * kPi - angle;
    axis = -axis;
  }
  if (std::abs(angle - kPi) <= kTieTolerance) {
    angle = kPi;
    for (int i = 0; i < 3; ++i) {
      if (axis[i] != 0.0) {
        if (axis[i] < 0.0) axis = -axis;
        break;
      }
    }
  }
  return axis * angle;
}

Mat3 rodrigues(const Vec3& r) {
  const double theta2 = r.squaredNorm();
  const double theta = std::sqrt(theta2);
  // R = I + a [r]x + b [r]x^2 with a = sin(t)/t, b = (1 - cos(t))/t^2.
  double a;
  double b;
  if (theta < 1e-6) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  const Mat3 k = skew(r);
  return Mat3::Identity() + a * k + b * k * k;
}

Vec3 rotation_vector_from_matrix(const Mat3& rotation) {
  const double cos_theta =
      std::clamp((rotation.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double theta = std::acos(cos_theta);
  const Vec3 vee(rotation(2, 1) - rotation(1, 2),
                 rotation(0, 2) - rotation(2, 0),
                 rotation(1, 0) - rotation(0, 1));
  if (theta < 1e-6) {
    return canonicalize_rotation_vector(0.5 * vee);
  }
  if (kPi - theta > 1e-3) {
    return canonicalize_rotation_vector(theta / (2.0 * std::sin(theta)) * vee);
  }
  // Near pi the antisymmetric part vanishes; recover the axis from the
  // symmetric part (R + R^T)/2 = cos I + (1 - cos) n n^T, then fix its sign.
  const Mat3 sym = 0.5 * (rotation + rotation.transpose());
  const Mat3 b = (sym - cos_theta * Mat3::Identity()) / (1.0 - cos_theta);
  int col = 0;
  b.diagonal().maxCoeff(&col);
  Vec3 axis = b.col(col) / std::sqrt(std::max(b(col, col), 1e-300));
  axis.normalize();
  if (axis.dot(vee) < 0.0) axis = -axis;
  return canonicalize_rotation_vector(axis * theta);
}

Vec3 apply_pose(const Pose& pose, const Vec3& p) {
  return pose.rotation() * p + pose.t;
}

Vec2 project(const Vec3& p, const CameraIntrinsics& camera) {
  if (!(p.z() > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDepth,
                "cannot project a point with z = " + std::to_string(p.z()));
  }
  return {camera.fx * p.x() / p.z() + camera.cx,
          camera.fy * p.y() / p.z() + camera.cy};
}

Vec3 backproject(const Vec2& pixel, double depth,
                 const CameraIntrinsics& camera) {
  if (!(depth > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDepth,
                "depth must be positive, got " + std::to_string(depth));
  }
  return {(pixel.x() - camera.cx) / camera.fx * depth,
          (pixel.y() - camera.cy) / camera.fy * depth, depth};
}

BoardLayout BoardLayout::standard() {
  BoardLayout layout;
  layout.ids.resize(static_cast<std::size_t>(layout.rows * layout.cols));
  for (std::size_t i = 0; i < layout.ids.size(); ++i) {
    layout.ids[i] = static_cast<int>(i);
  }
  return layout;
}

std::optional<std::pair<int, int>> BoardLayout::cell_of(int marker_id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == marker_id) {
      return std::pair<int, int>(static_cast<int>(i) / cols,
                                 static_cast<int>(i) % cols);
    }
  }
  return std::nullopt;
}

void BoardLayout::validate() const {
  if (rows <= 0 || cols <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "board grid must be non-empty");
  }
  if (!(marker_size > 0.0) || !(marker_gap >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid marker dimensions");
  }
  if (ids.size() != static_cast<std::size_t>(rows * cols)) {
    throw Error(ErrorCode::kInvalidArgument,
                "board id map must have rows * cols entries");
  }
  if (std::set<int>(ids.begin(), ids.end()).size() != ids.size()) {
    throw Error(ErrorCode::kInvalidArgument, "board marker ids must be unique");
  }
  if (!cell_of(origin_marker_id)) {
    throw Error(ErrorCode::kUnknownMarker, "origin marker not on the board");
  }
}

Vec3 board_marker_point(const BoardLayout& layout, int marker_id) {
  const auto cell = layout.cell_of(marker_id);
  if (!cell) {
    throw Error(ErrorCode::kUnknownMarker,
                "marker " + std::to_string(marker_id) + " is not on the board");
  }
  const auto origin = layout.cell_of(layout.origin_marker_id);
  if (!origin) {
    throw Error(ErrorCode::kUnknownMarker, "origin marker not on the board");
  }
  const double pitch = layout.pitch();
  return {(cell->second - origin->second) * pitch,
          -(cell->first - origin->first) * pitch, 0.0};
}

Vec3 target_via_reference(const Vec3& p_t_wcs, const Vec3& p_ref_wcs,
                          const Mat3& r_ref, const Vec3& p_ref_bcs,
                          const Pose& board_pose_ccs) {
  const Vec3 in_reference = r_ref.transpose() * (p_t_wcs - p_ref_wcs);
  const Vec3 in_board = p_ref_bcs + in_reference;
  return apply_pose(board_pose_ccs, in_board);
}

std::vector<double> ray_sphere_intersect(const Vec3& origin, const Vec3& dir,
                                         const Vec3& center, double radius) {
  // |o + s d - c|^2 = r^2 with |d| = 1:  s^2 + 2 h s + c0 = 0.
  const Vec3 oc = origin - center;
  const double h = dir.dot(oc);
  const double c0 = oc.squaredNorm() - radius * radius;
  const double disc = h * h - c0;
  std::vector<double> roots;
  if (disc < -kTangentTolerance) return roots;
  if (disc <= kTangentTolerance) {
    if (-h >= 0.0) roots.push_back(-h);
    return roots;
  }
  // Stable pair: q = -(h + sign(h) sqrt(disc)), roots q and c0 / q.
  const double q = -(h + std::copysign(std::sqrt(disc), h));
  double s0 = q;
  double s1 = c0 / q;
  if (s0 > s1) std::swap(s0, s1);
  for (double s : {s0, s1}) {
    if (s >= 0.0) roots.push_back(s);
  }
  return roots;
}

double angular_error_deg(const Vec3& u, const Vec3& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 0.0) || !(nv > 0.0)) {
    throw Error(ErrorCode::kZeroVector, "angle with a zero-length vector");
  }
  const Vec3 a = u / nu;
  const Vec3 b = v / nv;
  // atan2 form of arccos(clamp(a . b)); keeps precision near 0 and 180.
  const double angle = std::atan2(a.cross(b).norm(), a.dot(b));
  return angle * 180.0 / kPi;
}

}  // namespace gazekit
