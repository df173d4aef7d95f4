// Copyright 2026 The msocc Authors. All Rights Reserved.
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

#pragma once

// Camera models, rigid transforms and voxel-lattice conventions.
//
// Frames: the camera frame is x right, y down, z forward (pinhole). The ego
// frame is x forward, y left, z up. Voxel grids are indexed (ix, iy, iz) and
// flattened row-major over (nx, ny, nz), i.e. z is the fastest axis:
//   flat = (ix * ny + iy) * nz + iz.

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace msocc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  /// Intrinsics of a feature map downsampled by `stride`.
  Intrinsics scaled(int stride) const;
  void validate() const;

  friend bool operator==(const Intrinsics&, const Intrinsics&) = default;
};

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }
  static RigidTransform translation_only(const Vec3& t);
  /// Rotation about +z by `yaw` radians followed by translation `t`.
  static RigidTransform from_yaw(double yaw, const Vec3& t = Vec3::Zero());

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  RigidTransform inverse() const;

  /// Orthonormal rotation with determinant +1, within `tol`.
  bool is_rigid(double tol = 1e-9) const;
  void validate() const;
};

/// (a ∘ b)(x) = a(b(x)).
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& t);

/// Transform taking points in the previous ego frame into the current ego
/// frame, given both ego→global poses.
RigidTransform relative_ego_motion(const RigidTransform& pose_prev,
                                   const RigidTransform& pose_cur);

struct Camera {
  Intrinsics intrinsics;
  RigidTransform cam_to_ego;
};

struct CameraRig {
  std::vector<Camera> cameras;

  std::size_t size() const { return cameras.size(); }
  CameraRig scaled(int stride) const;
  void validate() const;
};

struct FrustumSpec {
  int feat_width = 1;
  int feat_height = 1;
  int stride = 1;
  double depth_min = 1.0;
  double depth_max = 60.0;
  double depth_step = 1.0;

  /// ceil((depth_max - depth_min) / depth_step).
  int depth_bins() const;
  double bin_center(int bin) const { return depth_min + (bin + 0.5) * depth_step; }
  /// Bin containing `depth`, or nullopt outside [depth_min, depth_max).
  std::optional<int> bin_of(double depth) const;
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(feat_width) * static_cast<std::size_t>(feat_height);
  }
  std::size_t point_count() const {
    return pixel_count() * static_cast<std::size_t>(depth_bins());
  }
  void validate() const;

  friend bool operator==(const FrustumSpec&, const FrustumSpec&) = default;
};

struct VoxelGridSpec {
  int nx = 1;
  int ny = 1;
  int nz = 1;
  Vec3 origin = Vec3::Zero();
  Vec3 voxel_size = Vec3::Ones();

  /// 200x200x16 cells of 0.4 m starting at (-40, -40, -1).
  static VoxelGridSpec full_default();

  std::size_t cell_count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }
  std::size_t flat(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(ix) * ny + iy) * nz + iz;
  }
  std::array<int, 3> unflatten(std::size_t flat) const;
  Vec3 cell_center(int ix, int iy, int iz) const;
  Vec3 cell_center(std::size_t flat) const;
  /// Same extent, `factor` times fewer cells per axis.
  VoxelGridSpec coarsened(int factor) const;
  void validate() const;

  friend bool operator==(const VoxelGridSpec& a, const VoxelGridSpec& b) {
    return a.nx == b.nx && a.ny == b.ny && a.nz == b.nz && a.origin == b.origin &&
           a.voxel_size == b.voxel_size;
  }
};

/// Pinhole back-projection of pixel (u, v) at depth d (camera z).
Vec3 unproject(double u, double v, double depth, const Intrinsics& k);

/// Pinhole projection; requires p.z() > 0.
std::array<double, 2> project(const Vec3& p, const Intrinsics& k);

/// Ego-frame lattice of a camera frustum. Point order is row-major over
/// (d, v, u): offset = (d * feat_height + v) * feat_width + u. Each point is
/// the pixel center (u + 0.5, v + 0.5) in stride coordinates at the depth-bin
/// center. `k` must already be scaled to `f.stride`.
std::vector<Vec3> frustum_points(const Intrinsics& k, const FrustumSpec& f,
                                 const RigidTransform& cam_to_ego);

/// Flat index of the cell containing `p`; cells are half-open [lo, hi).
std::optional<std::size_t> voxel_index(const Vec3& p, const VoxelGridSpec& g);

}  // namespace msocc
