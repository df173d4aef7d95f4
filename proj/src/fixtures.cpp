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

#include "msocc/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "msocc/error.hpp"

namespace msocc {
namespace {

constexpr double kTextureScale = 0.35;  // metres per noise lattice cell
constexpr std::array<std::uint8_t, 13> kObjectLabels{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 16};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double lattice_value(std::uint64_t seed, int channel, std::int64_t x, std::int64_t y, std::int64_t z) {
  std::uint64_t h = mix_hash(seed, static_cast<std::uint64_t>(channel));
  h = mix_hash(h, static_cast<std::uint64_t>(x));
  h = mix_hash(h, static_cast<std::uint64_t>(y));
  h = mix_hash(h, static_cast<std::uint64_t>(z));
  return 2.0 * hash_unit(h) - 1.0;
}

// First occupied cell along o + t * dir for t in [0, t_max); dir is scaled so
// t is camera depth. Returns the entry parameter of that cell.
std::optional<double> march(const OccupancyGrid& occ, const VoxelGridSpec& g, const Vec3& o,
                            const Vec3& dir, double t_max) {
  const std::array<int, 3> dims{g.nx, g.ny, g.nz};
  Vec3 go, gd;
  for (int a = 0; a < 3; ++a) {
    go[a] = (o[a] - g.origin[a]) / g.voxel_size[a];
    gd[a] = dir[a] / g.voxel_size[a];
  }
  double t0 = 0.0, t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    if (gd[a] == 0.0) {
      if (go[a] < 0.0 || go[a] >= dims[a]) return std::nullopt;
      continue;
    }
    double ta = (0.0 - go[a]) / gd[a];
    double tb = (dims[a] - go[a]) / gd[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (!(t0 < t1)) return std::nullopt;

  std::array<int, 3> cell{}, step{};
  std::array<double, 3> t_next{}, t_delta{};
  for (int a = 0; a < 3; ++a) {
    const double p = go[a] + t0 * gd[a];
    cell[a] = std::clamp(static_cast<int>(std::floor(p)), 0, dims[a] - 1);
    if (gd[a] > 0.0) {
      step[a] = 1;
      t_next[a] = (cell[a] + 1 - go[a]) / gd[a];
      t_delta[a] = 1.0 / gd[a];
    } else if (gd[a] < 0.0) {
      step[a] = -1;
      t_next[a] = (cell[a] - go[a]) / gd[a];
      t_delta[a] = -1.0 / gd[a];
    } else {
      step[a] = 0;
      t_next[a] = std::numeric_limits<double>::infinity();
      t_delta[a] = std::numeric_limits<double>::infinity();
    }
  }

  double t = t0;
  while (true) {
    if (occ[g.flat(cell[0], cell[1], cell[2])]) return t;
    int axis = 0;
    if (t_next[1] < t_next[axis]) axis = 1;
    if (t_next[2] < t_next[axis]) axis = 2;
    t = t_next[axis];
    if (t >= t1) return std::nullopt;
    cell[axis] += step[axis];
    if (cell[axis] < 0 || cell[axis] >= dims[axis]) return std::nullopt;
    t_next[axis] += t_delta[axis];
  }
}

// Ray origin and camera-z-scaled direction of pixel (u, v).
std::pair<Vec3, Vec3> pixel_ray(const Intrinsics& k, const RigidTransform& cam_to_scene, int u, int v) {
  const Vec3 d_cam((u + 0.5 - k.cx) / k.fx, (v + 0.5 - k.cy) / k.fy, 1.0);
  return {cam_to_scene.translation, cam_to_scene.rotation * d_cam};
}

RigidTransform frame_to_scene(const SyntheticScene& scene, int frame) {
  require(frame >= 0 && static_cast<std::size_t>(frame) < scene.poses.size(), "frame index out of range");
  return relative_ego_motion(scene.poses[static_cast<std::size_t>(frame)], scene.poses.back());
}

void fill_box(const SceneBox& box, const VoxelGridSpec& g, OccupancyGrid& occ, SemanticGrid& sem) {
  const std::array<int, 3> dims{g.nx, g.ny, g.nz};
  std::array<int, 3> lo{}, hi{};
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::clamp(box.lo[a], 0, dims[a]);
    hi[a] = std::clamp(box.hi[a], 0, dims[a]);
  }
  for (int x = lo[0]; x < hi[0]; ++x)
    for (int y = lo[1]; y < hi[1]; ++y)
      for (int z = lo[2]; z < hi[2]; ++z) {
        occ[g.flat(x, y, z)] = 1;
        sem[g.flat(x, y, z)] = box.label;
      }
}

}  // namespace

std::uint64_t mix_hash(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (splitmix64(b) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

double hash_unit(std::uint64_t key) {
  return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

double value_noise(std::uint64_t seed, int channel, const Vec3& p) {
  const double fx = std::floor(p.x()), fy = std::floor(p.y()), fz = std::floor(p.z());
  const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy),
             iz = static_cast<std::int64_t>(fz);
  const double ax = p.x() - fx, ay = p.y() - fy, az = p.z() - fz;
  double acc = 0.0;
  for (int corner = 0; corner < 8; ++corner) {
    const int bx = (corner >> 2) & 1, by = (corner >> 1) & 1, bz = corner & 1;
    const double w = (bx ? ax : 1.0 - ax) * (by ? ay : 1.0 - ay) * (bz ? az : 1.0 - az);
    if (w == 0.0) continue;
    acc += w * lattice_value(seed, channel, ix + bx, iy + by, iz + bz);
  }
  return acc;
}

CameraRig make_surround_rig(int cameras, int width, int height, double hfov_deg, double mount_height) {
  require(cameras >= 1, "rig needs at least one camera");
  require(width > 0 && height > 0, "image size must be positive");
  require(hfov_deg > 0.0 && hfov_deg < 180.0, "field of view must lie in (0, 180) degrees");
  const double f = 0.5 * width / std::tan(0.5 * hfov_deg * std::numbers::pi / 180.0);
  CameraRig rig;
  for (int i = 0; i < cameras; ++i) {
    const double yaw = 2.0 * std::numbers::pi * i / cameras;
    const double c = std::cos(yaw), s = std::sin(yaw);
    Camera cam;
    cam.intrinsics = Intrinsics{f, f, 0.5 * width, 0.5 * height, width, height};
    // Columns: camera x (right), y (down), z (forward) in the ego frame.
    cam.cam_to_ego.rotation << s, 0.0, c,
                               -c, 0.0, s,
                               0.0, -1.0, 0.0;
    cam.cam_to_ego.translation = Vec3(0.0, 0.0, mount_height);
    rig.cameras.push_back(cam);
  }
  return rig;
}

DepthRender render_depth(const OccupancyGrid& occ, const VoxelGridSpec& grid, const CameraRig& rig,
                         const RigidTransform& ego_to_scene, const FrustumSpec& f) {
  grid.validate();
  f.validate();
  rig.validate();
  require_shape(occ, Shape{static_cast<std::size_t>(grid.nx), static_cast<std::size_t>(grid.ny),
                           static_cast<std::size_t>(grid.nz)},
                "occupancy");
  const std::size_t cameras = rig.size();
  const std::size_t plane = f.pixel_count();
  DepthRender out{Tensor<double>({cameras, static_cast<std::size_t>(f.feat_height),
                                  static_cast<std::size_t>(f.feat_width)}),
                  Tensor<std::uint8_t>({cameras, static_cast<std::size_t>(f.feat_height),
                                        static_cast<std::size_t>(f.feat_width)})};
  for (std::size_t cam = 0; cam < cameras; ++cam) {
    const Camera& c = rig.cameras[cam];
    const RigidTransform cam_to_scene = compose(ego_to_scene, c.cam_to_ego);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t px = 0; px < static_cast<std::ptrdiff_t>(plane); ++px) {
      const int u = static_cast<int>(px % f.feat_width);
      const int v = static_cast<int>(px / f.feat_width);
      const auto [o, dir] = pixel_ray(c.intrinsics, cam_to_scene, u, v);
      const auto hit = march(occ, grid, o, dir, f.depth_max);
      const std::size_t i = cam * plane + static_cast<std::size_t>(px);
      if (hit && f.bin_of(*hit)) {
        out.depth[i] = *hit;
        out.valid[i] = 1;
      }
    }
  }
  return out;
}

SyntheticScene make_scene(const SceneConfig& config) {
  const VoxelGridSpec& g = config.grid;
  g.validate();
  config.rig.validate();
  config.depth_frustum.validate();
  require(config.frames >= 1, "scene needs at least one frame");
  require(config.boxes >= 0, "box count must be non-negative");
  for (const auto& cam : config.rig.cameras) {
    require(cam.intrinsics.width / config.depth_frustum.stride == config.depth_frustum.feat_width &&
                cam.intrinsics.height / config.depth_frustum.stride == config.depth_frustum.feat_height,
            "depth frustum size does not match the rig image size at its stride");
  }

  const Shape shape{static_cast<std::size_t>(g.nx), static_cast<std::size_t>(g.ny),
                    static_cast<std::size_t>(g.nz)};
  SyntheticScene scene;
  scene.grid = g;
  scene.rig = config.rig;
  scene.seed = config.seed;
  scene.gt_occ = OccupancyGrid(shape, 0);
  scene.gt_sem = SemanticGrid(shape, kFreeLabel);
  scene.mask = CameraMask(shape, 0);

  if (config.ground_plane) {
    for (int x = 0; x < g.nx; ++x)
      for (int y = 0; y < g.ny; ++y) {
        const double lateral = std::abs(g.cell_center(x, y, 0).y());
        const std::uint8_t label = lateral < 6.0 ? kGroundLabels[0]
                                   : lateral < 9.0 ? kGroundLabels[1]
                                                   : kGroundLabels[2];
        scene.gt_occ[g.flat(x, y, 0)] = 1;
        scene.gt_sem[g.flat(x, y, 0)] = label;
      }
  }

  std::mt19937_64 rng(config.seed);
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(std::max(n, 1))); };
  const auto ego_cell = voxel_index(Vec3(0.0, 0.0, g.origin.z() + 0.5 * g.voxel_size.z()), g);
  const int z_floor = config.ground_plane && g.nz > 1 ? 1 : 0;
  for (int b = 0; b < config.boxes; ++b) {
    for (int attempt = 0; attempt < 32; ++attempt) {
      SceneBox box;
      const std::array<int, 3> size{1 + pick(std::max(1, g.nx / 8)), 1 + pick(std::max(1, g.ny / 8)),
                                    1 + pick(std::max(1, (g.nz - z_floor) / 2))};
      box.lo = {pick(g.nx - size[0] + 1), pick(g.ny - size[1] + 1), z_floor};
      box.hi = {box.lo[0] + size[0], box.lo[1] + size[1], std::min(g.nz, z_floor + size[2])};
      box.label = kObjectLabels[static_cast<std::size_t>(pick(static_cast<int>(kObjectLabels.size())))];
      if (ego_cell) {
        const auto [ex, ey, ez] = g.unflatten(*ego_cell);
        (void)ez;
        const bool covers_ego = ex >= box.lo[0] - 1 && ex < box.hi[0] + 1 && ey >= box.lo[1] - 1 &&
                                ey < box.hi[1] + 1;
        if (covers_ego) continue;
      }
      fill_box(box, g, scene.gt_occ, scene.gt_sem);
      scene.boxes.push_back(box);
      break;
    }
  }
  for (const auto& box : config.fixed_boxes) {
    fill_box(box, g, scene.gt_occ, scene.gt_sem);
    scene.boxes.push_back(box);
  }

  for (int f = 0; f < config.frames; ++f) {
    const double lag = static_cast<double>(f - (config.frames - 1));
    scene.poses.push_back(RigidTransform::from_yaw(config.yaw_rate * lag, Vec3(config.speed * lag, 0.0, 0.0)));
  }

  // Cells whose center is in front of some camera, inside its image and
  // within the depth range.
  const FrustumSpec& df = config.depth_frustum;
  std::vector<RigidTransform> ego_to_cam;
  for (const auto& cam : config.rig.cameras) ego_to_cam.push_back(invert(cam.cam_to_ego));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t cell = 0; cell < static_cast<std::ptrdiff_t>(g.cell_count()); ++cell) {
    const Vec3 center = g.cell_center(static_cast<std::size_t>(cell));
    for (std::size_t c = 0; c < ego_to_cam.size(); ++c) {
      const Vec3 p = ego_to_cam[c].apply(center);
      if (!(p.z() >= df.depth_min && p.z() < df.depth_max)) continue;
      const auto [u, v] = project(p, config.rig.cameras[c].intrinsics);
      const auto& k = config.rig.cameras[c].intrinsics;
      if (u >= 0.0 && u < k.width && v >= 0.0 && v < k.height) {
        scene.mask[static_cast<std::size_t>(cell)] = 1;
        break;
      }
    }
  }

  auto depth = render_depth(scene.gt_occ, g, config.rig.scaled(df.stride), RigidTransform::identity(), df);
  scene.gt_depth = std::move(depth.depth);
  scene.depth_valid = std::move(depth.valid);
  return scene;
}

Tensor<double> render_features(const SyntheticScene& scene, int frame, const FrustumSpec& f, int channels) {
  require(channels >= 1, "feature channel count must be >= 1");
  f.validate();
  const CameraRig rig = scene.rig.scaled(f.stride);
  const RigidTransform ego_to_scene = frame_to_scene(scene, frame);
  const std::size_t cameras = rig.size();
  const std::size_t plane = f.pixel_count();
  const auto ch = static_cast<std::size_t>(channels);
  Tensor<double> out({cameras, ch, static_cast<std::size_t>(f.feat_height),
                      static_cast<std::size_t>(f.feat_width)});
  const std::uint64_t surface_seed = mix_hash(scene.seed, 0x5eed0001);
  const std::uint64_t sky_seed = mix_hash(scene.seed, 0x5eed0002);
  for (std::size_t cam = 0; cam < cameras; ++cam) {
    const Camera& c = rig.cameras[cam];
    const RigidTransform cam_to_scene = compose(ego_to_scene, c.cam_to_ego);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t px = 0; px < static_cast<std::ptrdiff_t>(plane); ++px) {
      const int u = static_cast<int>(px % f.feat_width);
      const int v = static_cast<int>(px / f.feat_width);
      const auto [o, dir] = pixel_ray(c.intrinsics, cam_to_scene, u, v);
      const auto hit = march(scene.gt_occ, scene.grid, o, dir, f.depth_max);
      for (std::size_t k = 0; k < ch; ++k) {
        const double value = hit ? value_noise(surface_seed, static_cast<int>(k), (o + *hit * dir) / kTextureScale)
                                 : value_noise(sky_seed, static_cast<int>(k), dir.normalized() * 8.0);
        out[(cam * ch + k) * plane + static_cast<std::size_t>(px)] = value;
      }
    }
  }
  return out;
}

Tensor<double> render_depth_logits(const SyntheticScene& scene, int frame, const FrustumSpec& f) {
  const auto depth = render_depth(scene.gt_occ, scene.grid, scene.rig.scaled(f.stride),
                                  frame_to_scene(scene, frame), f);
  const std::size_t cameras = scene.rig.size();
  const std::size_t plane = f.pixel_count();
  const auto bins = static_cast<std::size_t>(f.depth_bins());
  Tensor<double> logits({cameras, bins, static_cast<std::size_t>(f.feat_height),
                         static_cast<std::size_t>(f.feat_width)});
  for (std::size_t cam = 0; cam < cameras; ++cam) {
    for (std::size_t px = 0; px < plane; ++px) {
      const std::size_t i = cam * plane + px;
      if (!depth.valid[i]) continue;
      for (std::size_t d = 0; d < bins; ++d) {
        const double r = (f.bin_center(static_cast<int>(d)) - depth.depth[i]) / f.depth_step;
        logits[(cam * bins + d) * plane + px] = -0.5 * r * r;
      }
    }
  }
  return logits;
}

std::pair<Tensor<double>, Tensor<double>> make_head_logits(const OccupancyGrid& occ, const SemanticGrid& sem,
                                                           int num_classes, std::uint64_t seed) {
  require(num_classes >= 1, "need at least one class");
  check_semantic_consistency(occ, sem);
  const std::size_t cells = occ.size();
  const auto classes = static_cast<std::size_t>(num_classes);
  Tensor<double> occ_logits(occ.shape());
  Shape sem_shape{classes};
  sem_shape.insert(sem_shape.end(), occ.shape().begin(), occ.shape().end());
  Tensor<double> sem_logits(sem_shape);
  const std::uint64_t occ_seed = mix_hash(seed, 0x0cc);
  const std::uint64_t sem_seed = mix_hash(seed, 0x5e3);
  for (std::size_t i = 0; i < cells; ++i) {
    occ_logits[i] = (occ[i] ? 2.0 : -2.0) + 3.0 * (hash_unit(mix_hash(occ_seed, i)) - 0.5);
    for (std::size_t c = 0; c < classes; ++c) {
      const double bias = (sem[i] == c) ? 3.0 : 0.0;
      sem_logits[c * cells + i] = bias + 2.0 * (hash_unit(mix_hash(sem_seed, c * cells + i)) - 0.5);
    }
  }
  return {std::move(occ_logits), std::move(sem_logits)};
}

std::pair<PredictionSet, PredictionSet> make_oracle_predictions(const SyntheticScene& scene, int num_classes,
                                                                double corrupt_fraction, FlipAxes axes) {
  require(num_classes >= 1, "need at least one class");
  require(corrupt_fraction >= 0.0 && corrupt_fraction <= 1.0, "corruption fraction must lie in [0, 1]");
  const std::size_t cells = scene.gt_occ.size();
  const auto classes = static_cast<std::size_t>(num_classes);
  Tensor<double> occ(scene.gt_occ.shape());
  Shape sem_shape{classes};
  sem_shape.insert(sem_shape.end(), scene.gt_occ.shape().begin(), scene.gt_occ.shape().end());
  Tensor<double> sem(sem_shape);
  const std::uint64_t corrupt_seed = mix_hash(scene.seed, 0xc0447);
  for (std::size_t i = 0; i < cells; ++i) {
    if (scene.gt_occ[i]) {
      require(scene.gt_sem[i] < classes, "ground-truth label outside the class range");
      const bool corrupted = hash_unit(mix_hash(corrupt_seed, i)) < corrupt_fraction;
      occ[i] = corrupted ? 0.0 : 1.0;
      sem[scene.gt_sem[i] * cells + i] = 1.0;
    } else {
      for (std::size_t c = 0; c < classes; ++c) sem[c * cells + i] = 1.0 / static_cast<double>(classes);
    }
  }

  std::pair<PredictionSet, PredictionSet> sets;
  for (const auto& tag : enumerate_tta()) {
    const PredictionEntry canonical{tag, occ, sem};
    sets.first.entries.push_back(apply_flips(canonical, axes));
    sets.second.entries.push_back(apply_flips(canonical, axes));
  }
  return sets;
}

TexturedPlanePair textured_plane_features(double depth, const Intrinsics& k, int channels,
                                          std::uint64_t seed, int disparity) {
  k.validate();
  require(depth > 0.0, "plane depth must be positive");
  require(channels >= 1, "feature channel count must be >= 1");
  if (disparity < 0) disparity = std::max(4, k.width / 4);

  TexturedPlanePair pair;
  pair.camera = Camera{k, RigidTransform::identity()};
  pair.disparity = disparity;
  pair.baseline = disparity * depth / k.fx;
  // The camera moves +baseline along x from the previous to the current frame.
  pair.prev_to_cur = RigidTransform::translation_only(Vec3(-pair.baseline, 0.0, 0.0));

  const auto ch = static_cast<std::size_t>(channels);
  const auto h = static_cast<std::size_t>(k.height), w = static_cast<std::size_t>(k.width);
  const double spacing = depth / k.fx;  // about one pixel footprint on the plane
  const std::uint64_t tex_seed = mix_hash(seed, 0x71a9e);
  auto render = [&](double shift) {
    Tensor<double> values({ch, h, w});
    for (std::size_t c = 0; c < ch; ++c)
      for (std::size_t v = 0; v < h; ++v)
        for (std::size_t u = 0; u < w; ++u) {
          const double x = (u + 0.5 - k.cx) * depth / k.fx - shift;
          const double y = (v + 0.5 - k.cy) * depth / k.fy;
          values[(c * h + v) * w + u] = value_noise(tex_seed, static_cast<int>(c), Vec3(x / spacing, y / spacing, 0.0));
        }
    return values;
  };
  pair.cur = FeatureMap{render(0.0), 1};
  pair.prev = FeatureMap{render(pair.baseline), 1};
  return pair;
}

}  // namespace msocc
