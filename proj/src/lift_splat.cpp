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

#include "msocc/lift_splat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "msocc/error.hpp"

namespace msocc {

DepthDistribution normalize_depth_logits(const Tensor<double>& logits) {
  require(logits.rank() == 3, "depth logits must be D x H x W");
  require_finite(logits, "depth logits");
  const std::size_t bins = logits.dim(0);
  const std::size_t plane = logits.dim(1) * logits.dim(2);
  require(bins >= 1, "depth logits need at least one bin");

  Tensor<double> probs(logits.shape());
  const double* in = logits.data();
  double* out = probs.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t px = 0; px < static_cast<std::ptrdiff_t>(plane); ++px) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < bins; ++d) peak = std::max(peak, in[d * plane + px]);
    double denom = 0.0;
    for (std::size_t d = 0; d < bins; ++d) {
      const double e = std::exp(in[d * plane + px] - peak);
      out[d * plane + px] = e;
      denom += e;
    }
    for (std::size_t d = 0; d < bins; ++d) out[d * plane + px] /= denom;
  }
  return DepthDistribution{std::move(probs)};
}

PoolingIndex build_pooling_index(const CameraRig& rig, const FrustumSpec& f,
                                 const VoxelGridSpec& g) {
  rig.validate();
  f.validate();
  g.validate();
  require(g.cell_count() < std::numeric_limits<std::uint32_t>::max(),
          "grid too large for 32-bit voxel ids");
  require(f.point_count() < std::numeric_limits<std::uint32_t>::max(),
          "frustum too large for 32-bit point ids");

  const std::size_t points = f.point_count();
  const std::size_t cameras = rig.size();
  constexpr std::uint32_t kOutside = std::numeric_limits<std::uint32_t>::max();

  // Target voxel of every frustum point, in (camera, point) order.
  std::vector<std::uint32_t> target(cameras * points, kOutside);
  for (std::size_t cam = 0; cam < cameras; ++cam) {
    const auto lattice =
        frustum_points(rig.cameras[cam].intrinsics, f, rig.cameras[cam].cam_to_ego);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(points); ++p) {
      if (const auto v = voxel_index(lattice[static_cast<std::size_t>(p)], g)) {
        target[cam * points + static_cast<std::size_t>(p)] = static_cast<std::uint32_t>(*v);
      }
    }
  }

  // Stable counting sort by voxel keeps the (camera, point) tie order.
  std::vector<std::size_t> counts(g.cell_count() + 1, 0);
  for (const std::uint32_t v : target) {
    if (v != kOutside) ++counts[v + 1];
  }
  for (std::size_t v = 1; v < counts.size(); ++v) counts[v] += counts[v - 1];

  PoolingIndex index;
  index.frustum = f;
  index.grid = g;
  index.camera_count = cameras;
  index.entries.resize(counts.back());
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  for (std::size_t i = 0; i < target.size(); ++i) {
    const std::uint32_t v = target[i];
    if (v == kOutside) continue;
    index.entries[cursor[v]++] = PoolingEntry{static_cast<std::uint32_t>(i / points),
                                              static_cast<std::uint32_t>(i % points), v};
  }

  for (std::size_t i = 0; i < index.entries.size(); ++i) {
    if (i == 0 || index.entries[i].voxel != index.entries[i - 1].voxel) {
      index.interval_starts.push_back(i);
    }
  }
  index.interval_starts.push_back(index.entries.size());
  return index;
}

VoxelFeatureGrid lift_and_pool(std::span<const FeatureMap> features,
                               std::span<const DepthDistribution> depths,
                               const PoolingIndex& index) {
  const FrustumSpec& f = index.frustum;
  require(features.size() == index.camera_count,
          "lift_and_pool: expected " + std::to_string(index.camera_count) + " feature maps");
  require(depths.size() == index.camera_count,
          "lift_and_pool: expected " + std::to_string(index.camera_count) + " depth maps");
  require(!features.empty(), "lift_and_pool: no cameras");

  const std::size_t channels = features[0].values.rank() == 3 ? features[0].channels() : 0;
  const Shape feat_shape{channels, static_cast<std::size_t>(f.feat_height),
                         static_cast<std::size_t>(f.feat_width)};
  const Shape depth_shape{static_cast<std::size_t>(f.depth_bins()),
                          static_cast<std::size_t>(f.feat_height),
                          static_cast<std::size_t>(f.feat_width)};
  for (std::size_t cam = 0; cam < features.size(); ++cam) {
    require_shape(features[cam].values, feat_shape, "features[" + std::to_string(cam) + "]");
    require_shape(depths[cam].probs, depth_shape, "depths[" + std::to_string(cam) + "]");
  }

  const std::size_t plane = f.pixel_count();
  const std::size_t cells = index.grid.cell_count();
  VoxelFeatureGrid out{Tensor<double>({channels, static_cast<std::size_t>(index.grid.nx),
                                       static_cast<std::size_t>(index.grid.ny),
                                       static_cast<std::size_t>(index.grid.nz)}),
                       index.grid};
  double* dst = out.values.data();
  const auto intervals = static_cast<std::ptrdiff_t>(index.interval_count());

#pragma omp parallel
  {
    std::vector<double> acc(channels);
#pragma omp for schedule(dynamic, 256)
    for (std::ptrdiff_t iv = 0; iv < intervals; ++iv) {
      const std::size_t begin = index.interval_starts[static_cast<std::size_t>(iv)];
      const std::size_t end = index.interval_starts[static_cast<std::size_t>(iv) + 1];
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t e = begin; e < end; ++e) {
        const PoolingEntry& entry = index.entries[e];
        const double weight = depths[entry.camera].probs[entry.point];
        const double* feat = features[entry.camera].values.data() + entry.point % plane;
        for (std::size_t c = 0; c < channels; ++c) acc[c] += weight * feat[c * plane];
      }
      const std::size_t voxel = index.entries[begin].voxel;
      for (std::size_t c = 0; c < channels; ++c) dst[c * cells + voxel] = acc[c];
    }
  }
  return out;
}

}  // namespace msocc
