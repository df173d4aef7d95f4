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

#include "msocc/reference/naive_kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "msocc/error.hpp"

namespace msocc::reference {
namespace {

Shape voxel_shape(std::size_t channels, const VoxelGridSpec& g) {
  return {channels, static_cast<std::size_t>(g.nx), static_cast<std::size_t>(g.ny),
          static_cast<std::size_t>(g.nz)};
}

template <typename Visit>
void for_each_point(const CameraRig& rig, const FrustumSpec& f, const VoxelGridSpec& g, Visit&& visit) {
  for (std::size_t cam = 0; cam < rig.size(); ++cam) {
    const Camera& camera = rig.cameras[cam];
    for (int d = 0; d < f.depth_bins(); ++d) {
      for (int v = 0; v < f.feat_height; ++v) {
        for (int u = 0; u < f.feat_width; ++u) {
          const Vec3 ego =
              camera.cam_to_ego.apply(unproject(u + 0.5, v + 0.5, f.bin_center(d), camera.intrinsics));
          if (const auto cell = voxel_index(ego, g)) visit(cam, d, v, u, *cell);
        }
      }
    }
  }
}

struct Block {
  std::size_t nx, ny, nz;
};

Block coarse_dims(const Tensor<std::uint8_t>& t) {
  require(t.rank() == 3 && t.dim(0) % 2 == 0 && t.dim(1) % 2 == 0 && t.dim(2) % 2 == 0,
          "reference: grid must be 3-D with even extents");
  return {t.dim(0) / 2, t.dim(1) / 2, t.dim(2) / 2};
}

template <typename Fn>
void for_each_child(const Tensor<std::uint8_t>& fine, std::size_t x, std::size_t y, std::size_t z, Fn&& fn) {
  for (std::size_t dx = 0; dx < 2; ++dx)
    for (std::size_t dy = 0; dy < 2; ++dy)
      for (std::size_t dz = 0; dz < 2; ++dz) {
        const std::size_t i = ((2 * x + dx) * fine.dim(1) + 2 * y + dy) * fine.dim(2) + 2 * z + dz;
        fn(fine[i]);
      }
}

}  // namespace

Tensor<double> lift_scatter(const CameraRig& rig, const FrustumSpec& f, const VoxelGridSpec& g,
                            std::span<const FeatureMap> features,
                            std::span<const DepthDistribution> depths) {
  const std::size_t channels = features.front().channels();
  const std::size_t cells = g.cell_count();
  Tensor<double> out(voxel_shape(channels, g));
  for_each_point(rig, f, g, [&](std::size_t cam, int d, int v, int u, std::size_t cell) {
    const FeatureMap& fm = features[cam];
    const std::size_t px = static_cast<std::size_t>(v) * fm.width() + static_cast<std::size_t>(u);
    const double p = depths[cam].probs[static_cast<std::size_t>(d) * fm.width() * fm.height() + px];
    for (std::size_t c = 0; c < channels; ++c) {
      out[c * cells + cell] += fm.values[c * fm.width() * fm.height() + px] * p;
    }
  });
  return out;
}

std::vector<double> in_bounds_mass(const CameraRig& rig, const FrustumSpec& f,
                                   const VoxelGridSpec& g, std::span<const FeatureMap> features,
                                   std::span<const DepthDistribution> depths) {
  const std::size_t channels = features.front().channels();
  std::vector<double> mass(channels, 0.0);
  for_each_point(rig, f, g, [&](std::size_t cam, int d, int v, int u, std::size_t) {
    const FeatureMap& fm = features[cam];
    const std::size_t plane = fm.width() * fm.height();
    const std::size_t px = static_cast<std::size_t>(v) * fm.width() + static_cast<std::size_t>(u);
    const double p = depths[cam].probs[static_cast<std::size_t>(d) * plane + px];
    for (std::size_t c = 0; c < channels; ++c) mass[c] += fm.values[c * plane + px] * p;
  });
  return mass;
}

Tensor<double> cost_volume(const FeatureMap& cur, const FeatureMap& prev,
                           const RigidTransform& prev_to_cur, const Camera& camera,
                           const FrustumSpec& f) {
  const Intrinsics& k = camera.intrinsics;
  const std::size_t channels = cur.channels();
  const int width = f.feat_width;
  const int height = f.feat_height;
  const std::size_t plane = f.pixel_count();
  Tensor<double> out({static_cast<std::size_t>(f.depth_bins()), static_cast<std::size_t>(height),
                      static_cast<std::size_t>(width)});
  const RigidTransform ego_to_prev_ego = invert(prev_to_cur);
  const RigidTransform ego_to_cam = invert(camera.cam_to_ego);

  auto at = [&](int c, int y, int x) {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return prev.values[static_cast<std::size_t>(c) * plane + static_cast<std::size_t>(y) * width + x];
  };

  for (int d = 0; d < f.depth_bins(); ++d) {
    for (int v = 0; v < height; ++v) {
      for (int u = 0; u < width; ++u) {
        const Vec3 cam = unproject(u + 0.5, v + 0.5, f.bin_center(d), k);
        const Vec3 prev_cam = ego_to_cam.apply(ego_to_prev_ego.apply(camera.cam_to_ego.apply(cam)));
        double cost = 0.0;
        if (prev_cam.z() > 0.0) {
          const double x = k.fx * prev_cam.x() / prev_cam.z() + k.cx;
          const double y = k.fy * prev_cam.y() / prev_cam.z() + k.cy;
          if (x >= 0.0 && x < width && y >= 0.0 && y < height) {
            const int x0 = static_cast<int>(std::floor(x - 0.5));
            const int y0 = static_cast<int>(std::floor(y - 0.5));
            const double ax = x - 0.5 - x0;
            const double ay = y - 0.5 - y0;
            for (std::size_t c = 0; c < channels; ++c) {
              const int ci = static_cast<int>(c);
              const double s = (1 - ax) * (1 - ay) * at(ci, y0, x0) + ax * (1 - ay) * at(ci, y0, x0 + 1) +
                               (1 - ax) * ay * at(ci, y0 + 1, x0) + ax * ay * at(ci, y0 + 1, x0 + 1);
              cost += cur.values[c * plane + static_cast<std::size_t>(v) * width + u] * s;
            }
            cost /= static_cast<double>(channels);
          }
        }
        out[(static_cast<std::size_t>(d) * height + v) * width + u] = cost;
      }
    }
  }
  return out;
}

OccupancyGrid block_max(const OccupancyGrid& occ) {
  const Block b = coarse_dims(occ);
  OccupancyGrid out({b.nx, b.ny, b.nz});
  for (std::size_t x = 0; x < b.nx; ++x)
    for (std::size_t y = 0; y < b.ny; ++y)
      for (std::size_t z = 0; z < b.nz; ++z) {
        std::uint8_t m = 0;
        for_each_child(occ, x, y, z, [&](std::uint8_t v) { m = std::max(m, v); });
        out[(x * b.ny + y) * b.nz + z] = m;
      }
  return out;
}

CameraMask block_or(const CameraMask& mask) {
  const Block b = coarse_dims(mask);
  CameraMask out({b.nx, b.ny, b.nz});
  for (std::size_t x = 0; x < b.nx; ++x)
    for (std::size_t y = 0; y < b.ny; ++y)
      for (std::size_t z = 0; z < b.nz; ++z) {
        bool any = false;
        for_each_child(mask, x, y, z, [&](std::uint8_t v) { any = any || v != 0; });
        out[(x * b.ny + y) * b.nz + z] = any ? 1 : 0;
      }
  return out;
}

SemanticGrid block_majority(const SemanticGrid& sem, const OccupancyGrid& occ_coarse) {
  const Block b = coarse_dims(sem);
  SemanticGrid out({b.nx, b.ny, b.nz});
  for (std::size_t x = 0; x < b.nx; ++x)
    for (std::size_t y = 0; y < b.ny; ++y)
      for (std::size_t z = 0; z < b.nz; ++z) {
        const std::size_t i = (x * b.ny + y) * b.nz + z;
        if (!occ_coarse[i]) {
          out[i] = kFreeLabel;
          continue;
        }
        std::map<std::uint8_t, int> votes;
        for_each_child(sem, x, y, z, [&](std::uint8_t v) {
          if (v != kFreeLabel) ++votes[v];
        });
        std::uint8_t best = kFreeLabel;
        int best_votes = 0;
        for (const auto& [label, n] : votes) {
          if (n > best_votes) {
            best = label;
            best_votes = n;
          }
        }
        out[i] = best;
      }
  return out;
}

Tensor<double> trilinear_warp(const Tensor<double>& values, const VoxelGridSpec& g,
                              const RigidTransform& prev_to_cur) {
  const std::size_t channels = values.dim(0);
  const std::size_t cells = g.cell_count();
  Tensor<double> out(values.shape());
  const RigidTransform cur_to_prev = prev_to_cur.inverse();
  auto sample = [&](std::size_t c, int x, int y, int z) {
    if (x < 0 || y < 0 || z < 0 || x >= g.nx || y >= g.ny || z >= g.nz) return 0.0;
    return values[c * cells + g.flat(x, y, z)];
  };
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iy = 0; iy < g.ny; ++iy)
      for (int iz = 0; iz < g.nz; ++iz) {
        const Vec3 p = cur_to_prev.apply(g.cell_center(ix, iy, iz));
        const Vec3 q = (p - g.origin).cwiseQuotient(g.voxel_size) - Vec3::Constant(0.5);
        const int x0 = static_cast<int>(std::floor(q.x()));
        const int y0 = static_cast<int>(std::floor(q.y()));
        const int z0 = static_cast<int>(std::floor(q.z()));
        const double fx = q.x() - x0, fy = q.y() - y0, fz = q.z() - z0;
        for (std::size_t c = 0; c < channels; ++c) {
          const double c00 = sample(c, x0, y0, z0) * (1 - fz) + sample(c, x0, y0, z0 + 1) * fz;
          const double c01 = sample(c, x0, y0 + 1, z0) * (1 - fz) + sample(c, x0, y0 + 1, z0 + 1) * fz;
          const double c10 = sample(c, x0 + 1, y0, z0) * (1 - fz) + sample(c, x0 + 1, y0, z0 + 1) * fz;
          const double c11 = sample(c, x0 + 1, y0 + 1, z0) * (1 - fz) + sample(c, x0 + 1, y0 + 1, z0 + 1) * fz;
          const double c0 = c00 * (1 - fy) + c01 * fy;
          const double c1 = c10 * (1 - fy) + c11 * fy;
          out[c * cells + g.flat(ix, iy, iz)] = c0 * (1 - fx) + c1 * fx;
        }
      }
  return out;
}

EnsembleResult ensemble_loop(const PredictionSet& a, const PredictionSet& b,
                             const EnsembleConfig& cfg) {
  const Shape& sem_shape = a.entries.front().sem.shape();
  const std::size_t classes = sem_shape[0];
  const Shape grid(sem_shape.begin() + 1, sem_shape.end());
  const std::size_t cells = element_count(grid);
  const double norm = cfg.weight_a * static_cast<double>(a.entries.size()) +
                      cfg.weight_b * static_cast<double>(b.entries.size());
  EnsembleResult r{Tensor<double>(grid), LabelGrid(grid)};
  std::vector<double> sem(classes * cells, 0.0);
  auto add = [&](const PredictionSet& set, double w) {
    for (const auto& e : set.entries) {
      for (std::size_t i = 0; i < cells; ++i) r.occ[i] += w * e.occ[i];
      for (std::size_t i = 0; i < classes * cells; ++i) sem[i] += w * e.sem[i];
    }
  };
  add(a, cfg.weight_a);
  add(b, cfg.weight_b);
  for (std::size_t i = 0; i < cells; ++i) {
    r.occ[i] /= norm;
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      if (sem[c * cells + i] > sem[best * cells + i]) best = c;
    }
    r.sem[i] = static_cast<std::uint8_t>(best);
  }
  return r;
}

ConfusionTally confusion_loop(const LabelGrid& pred, const LabelGrid& gt, const CameraMask& mask,
                              int num_classes, bool include_free) {
  ConfusionTally t(num_classes, include_free);
  auto slot = [&](std::uint8_t label) -> int {
    if (label == kFreeLabel) return include_free ? num_classes : -1;
    return label;
  };
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!mask[i]) continue;
    ++t.voxels_evaluated;
    const int p = slot(pred[i]);
    const int g = slot(gt[i]);
    if (p == g) {
      if (p >= 0) ++t.tp[static_cast<std::size_t>(p)];
      continue;
    }
    if (p >= 0) ++t.fp[static_cast<std::size_t>(p)];
    if (g >= 0) ++t.fn[static_cast<std::size_t>(g)];
  }
  return t;
}

double depth_cross_entropy(const Tensor<double>& logits, const Tensor<double>& gt_depth,
                           const Tensor<std::uint8_t>& valid, const FrustumSpec& f) {
  const std::size_t bins = static_cast<std::size_t>(f.depth_bins());
  const std::size_t plane = f.pixel_count();
  const std::size_t images = gt_depth.size() / plane;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t n = 0; n < images; ++n) {
    for (std::size_t px = 0; px < plane; ++px) {
      const std::size_t i = n * plane + px;
      if (!valid[i]) continue;
      const auto bin = f.bin_of(gt_depth[i]);
      require(bin.has_value(), "reference: valid depth outside the bin range");
      double m = -INFINITY;
      for (std::size_t d = 0; d < bins; ++d) m = std::max(m, logits[(n * bins + d) * plane + px]);
      double z = 0.0;
      for (std::size_t d = 0; d < bins; ++d) z += std::exp(logits[(n * bins + d) * plane + px] - m);
      sum += m + std::log(z) - logits[(n * bins + static_cast<std::size_t>(*bin)) * plane + px];
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& fn,
                                       std::vector<double> x, double h) {
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double up = fn(x);
    x[i] = x0 - h;
    const double down = fn(x);
    x[i] = x0;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace msocc::reference
