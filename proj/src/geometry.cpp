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

#include "msocc/geometry.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <string>

#include "msocc/error.hpp"

namespace msocc {

Intrinsics Intrinsics::scaled(int stride) const {
  require(stride >= 1, "stride must be >= 1");
  const double s = static_cast<double>(stride);
  return Intrinsics{fx / s, fy / s, cx / s, cy / s, width / stride, height / stride};
}

void Intrinsics::validate() const {
  require(fx > 0.0 && fy > 0.0, "intrinsics: focal lengths must be positive");
  require(width > 0 && height > 0, "intrinsics: image size must be positive");
}

RigidTransform RigidTransform::translation_only(const Vec3& t) {
  RigidTransform out;
  out.translation = t;
  return out;
}

RigidTransform RigidTransform::from_yaw(double yaw, const Vec3& t) {
  RigidTransform out;
  out.rotation = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  out.translation = t;
  return out;
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform out;
  out.rotation = rotation.transpose();
  out.translation = -(out.rotation * translation);
  return out;
}

bool RigidTransform::is_rigid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

void RigidTransform::validate() const {
  require(is_rigid(), "transform is not rigid (rotation must be orthonormal with det +1)");
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

RigidTransform invert(const RigidTransform& t) { return t.inverse(); }

RigidTransform relative_ego_motion(const RigidTransform& pose_prev,
                                   const RigidTransform& pose_cur) {
  return compose(invert(pose_cur), pose_prev);
}

CameraRig CameraRig::scaled(int stride) const {
  CameraRig out = *this;
  for (auto& cam : out.cameras) cam.intrinsics = cam.intrinsics.scaled(stride);
  return out;
}

void CameraRig::validate() const {
  require(!cameras.empty(), "camera rig must contain at least one camera");
  for (const auto& cam : cameras) {
    cam.intrinsics.validate();
    cam.cam_to_ego.validate();
  }
}

int FrustumSpec::depth_bins() const {
  const double span = (depth_max - depth_min) / depth_step;
  // Tolerate representation error so (60 - 1) / 1 gives exactly 59 bins.
  return static_cast<int>(std::ceil(span - 1e-9));
}

std::optional<int> FrustumSpec::bin_of(double depth) const {
  if (!(depth >= depth_min) || !(depth < depth_max)) return std::nullopt;
  const int bin = static_cast<int>(std::floor((depth - depth_min) / depth_step));
  if (bin < 0 || bin >= depth_bins()) return std::nullopt;
  return bin;
}

void FrustumSpec::validate() const {
  require(feat_width > 0 && feat_height > 0, "frustum: feature size must be positive");
  require(stride >= 1, "frustum: stride must be >= 1");
  require(depth_min > 0.0, "frustum: depth_min must be positive");
  require(depth_step > 0.0, "frustum: depth_step must be positive");
  require(depth_max > depth_min, "frustum: depth_max must exceed depth_min");
  require(depth_bins() >= 1, "frustum: at least one depth bin required");
}

VoxelGridSpec VoxelGridSpec::full_default() {
  VoxelGridSpec g;
  g.nx = 200;
  g.ny = 200;
  g.nz = 16;
  g.origin = Vec3(-40.0, -40.0, -1.0);
  g.voxel_size = Vec3(0.4, 0.4, 0.4);
  return g;
}

std::array<int, 3> VoxelGridSpec::unflatten(std::size_t flat) const {
  const int iz = static_cast<int>(flat % nz);
  flat /= nz;
  const int iy = static_cast<int>(flat % ny);
  const int ix = static_cast<int>(flat / ny);
  return {ix, iy, iz};
}

Vec3 VoxelGridSpec::cell_center(int ix, int iy, int iz) const {
  return origin + Vec3((ix + 0.5) * voxel_size.x(), (iy + 0.5) * voxel_size.y(),
                       (iz + 0.5) * voxel_size.z());
}

Vec3 VoxelGridSpec::cell_center(std::size_t flat) const {
  const auto [ix, iy, iz] = unflatten(flat);
  return cell_center(ix, iy, iz);
}

VoxelGridSpec VoxelGridSpec::coarsened(int factor) const {
  require(factor >= 1, "coarsening factor must be >= 1");
  require(nx % factor == 0 && ny % factor == 0 && nz % factor == 0,
          "grid dimensions must be divisible by the coarsening factor");
  VoxelGridSpec out = *this;
  out.nx /= factor;
  out.ny /= factor;
  out.nz /= factor;
  out.voxel_size *= static_cast<double>(factor);
  return out;
}

void VoxelGridSpec::validate() const {
  require(nx >= 1 && ny >= 1 && nz >= 1, "grid: cell counts must be >= 1");
  require((voxel_size.array() > 0.0).all(), "grid: voxel sizes must be positive");
  require(origin.allFinite(), "grid: origin must be finite");
}

Vec3 unproject(double u, double v, double depth, const Intrinsics& k) {
  if (!(depth > 0.0)) fail_validation("unproject: depth must be positive");
  return Vec3((u - k.cx) * depth / k.fx, (v - k.cy) * depth / k.fy, depth);
}

std::array<double, 2> project(const Vec3& p, const Intrinsics& k) {
  if (!(p.z() > 0.0)) fail_validation("project: point must lie in front of the camera");
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

std::vector<Vec3> frustum_points(const Intrinsics& k, const FrustumSpec& f,
                                 const RigidTransform& cam_to_ego) {
  f.validate();
  const int bins = f.depth_bins();
  const std::size_t plane = f.pixel_count();
  std::vector<Vec3> points(plane * static_cast<std::size_t>(bins));
#pragma omp parallel for schedule(static)
  for (int d = 0; d < bins; ++d) {
    const double depth = f.bin_center(d);
    for (int v = 0; v < f.feat_height; ++v) {
      for (int u = 0; u < f.feat_width; ++u) {
        const std::size_t offset =
            static_cast<std::size_t>(d) * plane + static_cast<std::size_t>(v) * f.feat_width + u;
        points[offset] = cam_to_ego.apply(unproject(u + 0.5, v + 0.5, depth, k));
      }
    }
  }
  return points;
}

std::optional<std::size_t> voxel_index(const Vec3& p, const VoxelGridSpec& g) {
  const std::array<int, 3> dims{g.nx, g.ny, g.nz};
  std::array<int, 3> cell{};
  for (int a = 0; a < 3; ++a) {
    const double q = std::floor((p[a] - g.origin[a]) / g.voxel_size[a]);
    if (!(q >= 0.0) || !(q < dims[a])) return std::nullopt;
    cell[a] = static_cast<int>(q);
  }
  return g.flat(cell[0], cell[1], cell[2]);
}

}  // namespace msocc
