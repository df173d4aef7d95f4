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

// Plane-sweep cost volumes between adjacent frames, and ego-motion alignment
// plus channel stacking of past voxel grids.

#include <span>
#include <vector>

#include "msocc/geometry.hpp"
#include "msocc/lift_splat.hpp"
#include "msocc/tensor.hpp"

namespace msocc {

/// D x H x W matching scores of one camera.
struct CostVolume {
  Tensor<double> values;
  int stride = 4;
};

/// Bilinear sample of every channel at continuous pixel position (x, y),
/// where pixel (i, j) has its center at (i + 0.5, j + 0.5). Positions outside
/// [0, W) x [0, H) return false and leave `out` untouched; inside, neighbours
/// are clamped to the image border.
bool bilinear_sample(const FeatureMap& map, double x, double y, std::span<double> out);

/// cost[d, v, u] = <cur[:, v, u], prev(reproject(u, v, depth_d))> / C.
///
/// The pixel is lifted at each depth hypothesis in the current camera, moved
/// current ego -> previous ego (the inverse of `prev_to_cur`), and projected
/// into the same camera of the previous frame. Hypotheses that land behind
/// the camera or outside the previous image score 0. `camera` carries
/// intrinsics already scaled to the feature stride.
CostVolume build_cost_volume(const FeatureMap& cur, const FeatureMap& prev,
                             const RigidTransform& prev_to_cur, const Camera& camera,
                             const FrustumSpec& f);

/// Average-pools the spatial axes by target_stride / cv.stride.
CostVolume rescale_cost_volume(const CostVolume& cv, int target_stride);

enum class WarpMode { kNearest, kTrilinear };

/// Resamples a previous-frame grid into the current ego frame: each target
/// cell center x is looked up at invert(prev_to_cur)(x) in `prev`. Samples
/// outside the grid are zero.
VoxelFeatureGrid warp_voxel_grid(const VoxelFeatureGrid& prev,
                                 const RigidTransform& prev_to_cur, WarpMode mode);

/// (K*C) x nx x ny x nz, frames ordered oldest first.
struct TemporalStack {
  Tensor<double> values;
  VoxelGridSpec spec;
  std::size_t frames = 0;
  std::size_t channels_per_frame = 0;

  VoxelFeatureGrid frame(std::size_t k) const;
};

TemporalStack stack_temporal(std::span<const VoxelFeatureGrid> grids);

}  // namespace msocc
