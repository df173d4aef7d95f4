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

#include "msocc/temporal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "msocc/error.hpp"

namespace msocc {
namespace {

constexpr double kLatticeSnap = 1e-9;

}  // namespace


bool bilinear_sample(const FeatureMap& map, double x, double y, std::span<double> out) {
  const auto width = static_cast<int>(map.width());
  const auto height = static_cast<int>(map.height());
  if (!(x >= 0.0 && x < width && y >= 0.0 && y < height)) return false;

  const double xs = x - 0.5;
  const double ys = y - 0.5;
  const double x0f = std::floor(xs);
  const double y0f = std::floor(ys);
  const double ax = xs - x0f;
  const double ay = ys - y0f;
  const int x0 = std::clamp(static_cast<int>(x0f), 0, width - 1);
  const int x1 = std::clamp(static_cast<int>(x0f) + 1, 0, width - 1);
  const int y0 = std::clamp(static_cast<int>(y0f), 0, height - 1);
  const int y1 = std::clamp(static_cast<int>(y0f) + 1, 0, height - 1);

  const std::size_t plane = map.width() * map.height();
  const double w00 = (1.0 - ax) * (1.0 - ay);
  const double w10 = ax * (1.0 - ay);
  const double w01 = (1.0 - ax) * ay;
  const double w11 = ax * ay;
  const std::size_t i00 = static_cast<std::size_t>(y0) * width + x0;
  const std::size_t i10 = static_cast<std::size_t>(y0) * width + x1;
  const std::size_t i01 = static_cast<std::size_t>(y1) * width + x0;
  const std::size_t i11 = static_cast<std::size_t>(y1) * width + x1;
  const double* v = map.values.data();
  for (std::size_t c = 0; c < out.size(); ++c) {
    const double* ch = v + c * plane;
    out[c] = w00 * ch[i00] + w10 * ch[i10] + w01 * ch[i01] + w11 * ch[i11];
  }
  return true;
}

CostVolume build_cost_volume(const FeatureMap& cur, const FeatureMap& prev,
                             const RigidTransform& prev_to_cur, const Camera& camera,
                             const FrustumSpec& f) {
  f.validate();
  camera.intrinsics.validate();
  prev_to_cur.validate();
  require(cur.values.rank() == 3, "cost volume: current features must be C x H x W");
  require(cur.values.shape() == prev.values.shape(),
          "cost volume: current and previous feature maps differ in shape");
  require(cur.height() == static_cast<std::size_t>(f.feat_height) &&
              cur.width() == static_cast<std::size_t>(f.feat_width),
          "cost volume: feature size does not match frustum spec");
  require(cur.channels() >= 1, "cost volume: features need at least one channel");

  const std::size_t channels = cur.channels();
  const int bins = f.depth_bins();
  const std::size_t plane = f.pixel_count();
  const Intrinsics& k = camera.intrinsics;

  // current camera -> current ego -> previous ego -> previous camera
  const RigidTransform cur_cam_to_prev_cam = compose(
      invert(camera.cam_to_ego), compose(invert(prev_to_cur), camera.cam_to_ego));

  CostVolume cv{Tensor<double>({static_cast<std::size_t>(bins),
                                static_cast<std::size_t>(f.feat_height),
                                static_cast<std::size_t>(f.feat_width)}),
                f.stride};
  double* out = cv.values.data();
  const double* cur_values = cur.values.data();

#pragma omp parallel
  {
    std::vector<double> sample(channels);
#pragma omp for schedule(static)
    for (std::ptrdiff_t px = 0; px < static_cast<std::ptrdiff_t>(plane); ++px) {
      const int u = static_cast<int>(px % f.feat_width);
      const int v = static_cast<int>(px / f.feat_width);
      for (int d = 0; d < bins; ++d) {
        const Vec3 p = cur_cam_to_prev_cam.apply(unproject(u + 0.5, v + 0.5, f.bin_center(d), k));
        double cost = 0.0;
        if (p.z() > 0.0) {
          const auto [x, y] = project(p, k);
          if (bilinear_sample(prev, x, y, sample)) {
            for (std::size_t c = 0; c < channels; ++c) {
              cost += cur_values[c * plane + static_cast<std::size_t>(px)] * sample[c];
            }
            cost /= static_cast<double>(channels);
          }
        }
        out[static_cast<std::size_t>(d) * plane + static_cast<std::size_t>(px)] = cost;
      }
    }
  }
  return cv;
}

CostVolume rescale_cost_volume(const CostVolume& cv, int target_stride) {
  require(cv.values.rank() == 3, "cost volume must be D x H x W");
  require(cv.stride >= 1 && target_stride >= cv.stride && target_stride % cv.stride == 0,
          "target stride " + std::to_string(target_stride) + " is not a multiple of " +
              std::to_string(cv.stride));
  const std::size_t factor = static_cast<std::size_t>(target_stride / cv.stride);
  const std::size_t bins = cv.values.dim(0);
  const std::size_t height = cv.values.dim(1);
  const std::size_t width = cv.values.dim(2);
  require(height % factor == 0 && width % factor == 0,
          "cost volume size " + shape_to_string(cv.values.shape()) +
              " is not divisible by pooling factor " + std::to_string(factor));

  const std::size_t out_h = height / factor;
  const std::size_t out_w = width / factor;
  CostVolume out{Tensor<double>({bins, out_h, out_w}), target_stride};
  const double norm = 1.0 / static_cast<double>(factor * factor);
  const double* in = cv.values.data();
  double* dst = out.values.data();
#pragma omp parallel for collapse(2) schedule(static)
  for (std::ptrdiff_t d = 0; d < static_cast<std::ptrdiff_t>(bins); ++d) {
    for (std::ptrdiff_t y = 0; y < static_cast<std::ptrdiff_t>(out_h); ++y) {
      for (std::size_t x = 0; x < out_w; ++x) {
        double acc = 0.0;
        for (std::size_t dy = 0; dy < factor; ++dy) {
          const double* row =
              in + (static_cast<std::size_t>(d) * height + static_cast<std::size_t>(y) * factor + dy) * width;
          for (std::size_t dx = 0; dx < factor; ++dx) acc += row[x * factor + dx];
        }
        dst[(static_cast<std::size_t>(d) * out_h + static_cast<std::size_t>(y)) * out_w + x] = acc * norm;
      }
    }
  }
  return out;
}

VoxelFeatureGrid warp_voxel_grid(const VoxelFeatureGrid& prev,
                                 const RigidTransform& prev_to_cur, WarpMode mode) {
  prev_to_cur.validate();
  const VoxelGridSpec& g = prev.spec;
  g.validate();
  require(prev.values.rank() == 4 && prev.values.dim(1) == static_cast<std::size_t>(g.nx) &&
              prev.values.dim(2) == static_cast<std::size_t>(g.ny) &&
              prev.values.dim(3) == static_cast<std::size_t>(g.nz),
          "warp: values must be C x nx x ny x nz matching the grid spec");

  const std::size_t channels = prev.channels();
  const std::size_t cells = g.cell_count();
  const RigidTransform cur_to_prev = invert(prev_to_cur);
  VoxelFeatureGrid out{Tensor<double>(prev.values.shape()), g};
  const double* src = prev.values.data();
  double* dst = out.values.data();

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t cell = 0; cell < static_cast<std::ptrdiff_t>(cells); ++cell) {
    const Vec3 p = cur_to_prev.apply(g.cell_center(static_cast<std::size_t>(cell)));
    if (mode == WarpMode::kNearest) {
      if (const auto src_cell = voxel_index(p, g)) {
        for (std::size_t c = 0; c < channels; ++c) {
          dst[c * cells + static_cast<std::size_t>(cell)] = src[c * cells + *src_cell];
        }
      }
      continue;
    }

    // Continuous index where cell centers sit on integers. Indices within
    // kLatticeSnap of an integer are rounded so that lattice-aligned motions
    // copy cells exactly instead of leaking rounding noise into neighbours.
    std::array<int, 3> base{};
    std::array<double, 3> frac{};
    for (int a = 0; a < 3; ++a) {
      double q = (p[a] - g.origin[a]) / g.voxel_size[a] - 0.5;
      if (std::abs(q - std::nearbyint(q)) < kLatticeSnap) q = std::nearbyint(q);
      const double fl = std::floor(q);
      base[a] = static_cast<int>(fl);
      frac[a] = q - fl;
    }
    const std::array<int, 3> dims{g.nx, g.ny, g.nz};
    for (int corner = 0; corner < 8; ++corner) {
      double w = 1.0;
      std::array<int, 3> idx{};
      bool inside = true;
      for (int a = 0; a < 3; ++a) {
        const int bit = (corner >> (2 - a)) & 1;
        idx[a] = base[a] + bit;
        w *= bit ? frac[a] : 1.0 - frac[a];
        inside = inside && idx[a] >= 0 && idx[a] < dims[a];
      }
      if (!inside || w == 0.0) continue;
      const std::size_t s = g.flat(idx[0], idx[1], idx[2]);
      for (std::size_t c = 0; c < channels; ++c) {
        dst[c * cells + static_cast<std::size_t>(cell)] += w * src[c * cells + s];
      }
    }
  }
  return out;
}

VoxelFeatureGrid TemporalStack::frame(std::size_t k) const {
  require(k < frames, "temporal stack frame out of range");
  const std::size_t cells = spec.cell_count();
  const std::size_t block = channels_per_frame * cells;
  std::vector<double> data(values.storage().begin() + static_cast<std::ptrdiff_t>(k * block),
                           values.storage().begin() + static_cast<std::ptrdiff_t>((k + 1) * block));
  return VoxelFeatureGrid{Tensor<double>({channels_per_frame, static_cast<std::size_t>(spec.nx),
                                          static_cast<std::size_t>(spec.ny),
                                          static_cast<std::size_t>(spec.nz)},
                                         std::move(data)),
                          spec};
}

TemporalStack stack_temporal(std::span<const VoxelFeatureGrid> grids) {
  require(!grids.empty(), "stack_temporal: no grids");
  const VoxelGridSpec& spec = grids[0].spec;
  const Shape& shape = grids[0].values.shape();
  require(shape.size() == 4, "stack_temporal: grids must be C x nx x ny x nz");
  for (std::size_t k = 1; k < grids.size(); ++k) {
    require(grids[k].spec == spec, "stack_temporal: grid specs differ at frame " + std::to_string(k));
    require(grids[k].values.shape() == shape,
            "stack_temporal: channel counts differ at frame " + std::to_string(k));
  }
  TemporalStack stack;
  stack.spec = spec;
  stack.frames = grids.size();
  stack.channels_per_frame = shape[0];
  std::vector<double> data;
  data.reserve(grids.size() * grids[0].values.size());
  for (const auto& g : grids) data.insert(data.end(), g.values.storage().begin(), g.values.storage().end());
  stack.values = Tensor<double>({shape[0] * grids.size(), shape[1], shape[2], shape[3]}, std::move(data));
  return stack;
}

}  // namespace msocc
