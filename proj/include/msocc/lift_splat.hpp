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

// Camera-to-voxel lifting with a precomputed pooling index.
//
// Every (camera, pixel, depth bin) frustum point that lands inside the voxel
// grid becomes one index entry. Entries are sorted by target voxel so each
// voxel's contributions form a contiguous interval; pooling then reduces one
// interval per task, without atomics and without materialising the
// C x (H*W*D) lifted tensor.

#include <cstdint>
#include <span>
#include <vector>

#include "msocc/geometry.hpp"
#include "msocc/tensor.hpp"

namespace msocc {

/// C x H x W feature map of one camera.
struct FeatureMap {
  Tensor<double> values;
  int stride = 1;

  std::size_t channels() const { return values.dim(0); }
  std::size_t height() const { return values.dim(1); }
  std::size_t width() const { return values.dim(2); }
};

/// D x H x W per-pixel categorical distribution over depth bins.
struct DepthDistribution {
  Tensor<double> probs;

  std::size_t bins() const { return probs.dim(0); }
};

/// Per-pixel softmax over the leading (depth) axis, max-subtracted.
DepthDistribution normalize_depth_logits(const Tensor<double>& logits);

struct PoolingEntry {
  std::uint32_t camera;
  std::uint32_t point;  // frustum offset, (d, v, u) row-major
  std::uint32_t voxel;  // flat target cell
};

struct PoolingIndex {
  FrustumSpec frustum;
  VoxelGridSpec grid;
  std::size_t camera_count = 0;
  /// Sorted by (voxel, camera, point).
  std::vector<PoolingEntry> entries;
  /// interval_starts[i] .. interval_starts[i + 1] is the i-th occupied voxel.
  /// Has interval_count() + 1 elements; the last equals entries.size().
  std::vector<std::size_t> interval_starts;

  std::size_t interval_count() const {
    return interval_starts.empty() ? 0 : interval_starts.size() - 1;
  }
};

/// `rig` intrinsics must already be scaled to `f.stride`.
PoolingIndex build_pooling_index(const CameraRig& rig, const FrustumSpec& f,
                                 const VoxelGridSpec& g);

/// C x nx x ny x nz grid. Cells without contributions are zero.
struct VoxelFeatureGrid {
  Tensor<double> values;
  VoxelGridSpec spec;

  std::size_t channels() const { return values.dim(0); }
};

/// Sum-pools depth-weighted features into the grid:
///   out[c, v] = sum over entries (cam, p) -> v of depth[cam][p] * feat[cam][c, pixel(p)]
/// Each voxel is reduced in entry order, so the result does not depend on
/// the number of threads.
VoxelFeatureGrid lift_and_pool(std::span<const FeatureMap> features,
                               std::span<const DepthDistribution> depths,
                               const PoolingIndex& index);

}  // namespace msocc
