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

#ifndef GAZEKIT_GEOMETRY_H_
#define GAZEKIT_GEOMETRY_H_

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace gazekit {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Pinhole intrinsics without distortion. Pixel (u, v) relates to a camera
// frame point (x, y, z) as u = fx * x / z + cx, v = fy * y / z + cy.
struct CameraIntrinsics {
  double fx = 600.0;
  double fy = 600.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;

  // Throws kInvalidArgument when the invariants do not hold.
  void validate() const;

  friend bool operator==(const CameraIntrinsics&,
                         const CameraIntrinsics&) = default;
};

// Axis-angle rotation vector plus translation. Maps points from the local
// frame into the parent frame: p' = R(r) p + t.
struct Pose {
  Vec3 r = Vec3::Zero();
  Vec3 t = Vec3::Zero();

  static Pose identity() { return {}; }
  // Builds a pose with a canonicalized rotation vector.
  static Pose from(const Vec3& r, const Vec3& t);

  Mat3 rotation() const;
  Mat4 matrix() const;
};

// Reduces a rotation vector to norm <= pi. At exactly pi the sign is chosen so
// the first nonzero component is positive.
Vec3 canonicalize_rotation_vector(const Vec3& r);

// Rodrigues' formula. The zero vector maps to the identity.
Mat3 rodrigues(const Vec3& r);

// Inverse of rodrigues(); the result is canonical.
Vec3 rotation_vector_from_matrix(const Mat3& rotation);

Vec3 apply_pose(const Pose& pose, const Vec3& p);

// Throws kNonPositiveDepth when p.z() <= 0.
Vec2 project(const Vec3& p, const CameraIntrinsics& camera);

// Throws kNonPositiveDepth when depth <= 0.
Vec3 backproject(const Vec2& pixel, double depth,
                 const CameraIntrinsics& camera);

// Planar grid of square fiducial markers. `ids` is row-major, row 0 first.
//
// Board frame: origin at the center of `origin_marker_id`, +x toward
// increasing columns, +y toward decreasing rows (row 0 is the far edge of the
// board, nearest the robot), +z out of the board plane.
struct BoardLayout {
  int rows = 4;
  int cols = 5;
  double marker_size = 0.07;
  double marker_gap = 0.07;
  int origin_marker_id = 16;
  std::vector<int> ids;

  // 5 columns by 4 rows, 7 cm markers with 7 cm gaps, ids 0..19 row-major,
  // origin at marker 16.
  static BoardLayout standard();

  double pitch() const { return marker_size + marker_gap; }
  // (row, col) of a marker id, if present.
  std::optional<std::pair<int, int>> cell_of(int marker_id) const;
  void validate() const;
};

// Center of a marker in board coordinates (z = 0). Throws kUnknownMarker.
Vec3 board_marker_point(const BoardLayout& layout, int marker_id);

// Carries a point seen in an external (world) camera into the main camera
// frame via a reference marker whose board coordinates are known:
//   p_ref_frame = R_ref^T (p_t_wcs - p_ref_wcs)
//   p_bcs       = p_ref_bcs + p_ref_frame
//   p_ccs       = R_b p_bcs + t_b
Vec3 target_via_reference(const Vec3& p_t_wcs, const Vec3& p_ref_wcs,
                          const Mat3& r_ref, const Vec3& p_ref_bcs,
                          const Pose& board_pose_ccs);

// Non-negative ray parameters s (ascending) where origin + s * dir meets the
// sphere. `dir` must be unit length. A tangent ray yields one root.
std::vector<double> ray_sphere_intersect(const Vec3& origin, const Vec3& dir,
                                         const Vec3& center, double radius);

// Angle between two nonzero vectors in degrees, in [0, 180]. Throws
// kZeroVector.
double angular_error_deg(const Vec3& u, const Vec3& v);

}  // namespace gazekit

#endif  // GAZEKIT_GEOMETRY_H_
