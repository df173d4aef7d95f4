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

// Deterministic synthetic scenes for desk-scale verification.
//
// The scene lives in the current (last) ego frame, which coincides with the
// global frame: the last pose is the identity and earlier poses trail behind
// it along a gentle arc.

#include <array>
#include <cstdint>
#include <vector>

#include "msocc/geometry.hpp"
#include "msocc/gt_multiscale.hpp"
#include "msocc/lift_splat.hpp"
#include "msocc/postprocess.hpp"
#include "msocc/tensor.hpp"

namespace msocc {

/// Axis-aligned block of cells [lo, hi) carrying one label.
struct SceneBox {
  std::array<int, 3> lo{};
  std::array<int, 3> hi{};
  std::uint8_t label = 0;
};

struct SceneConfig {
  VoxelGridSpec grid;
  CameraRig rig;             // full-resolution intrinsics
  FrustumSpec depth_frustum; // resolution and depth range of gt_depth
  int frames = 9;            // oldest first; the last is the current frame
  int boxes = 6;             // random boxes
  std::vector<SceneBox> fixed_boxes;
  double speed = 1.0;        // metres per frame along ego +x
  double yaw_rate = 0.02;    // radians per frame
  bool ground_plane = true;
  std::uint64_t seed = 0;
};

struct SyntheticScene {
  VoxelGridSpec grid;
  OccupancyGrid gt_occ;
  SemanticGrid gt_sem;
  CameraMask mask;
  CameraRig rig;
  std::vector<RigidTransform> poses;  // ego -> global, oldest first
  std::vector<SceneBox> boxes;
  Tensor<double> gt_depth;            // N x H x W metres, current frame
  Tensor<std::uint8_t> depth_valid;   // N x H x W
  std::uint64_t seed = 0;
};

/// Ground labels used for the bottom layer of every scene.
inline constexpr std::array<std::uint8_t, 3> kGroundLabels{11, 13, 14};

/// N cameras evenly spaced in yaw around the ego origin at `mount_height`,
/// each looking horizontally outward.
CameraRig make_surround_rig(int cameras, int width, int height, double hfov_deg = 70.0,
                            double mount_height = 1.5);

SyntheticScene make_scene(const SceneConfig& config);

/// Camera-z depth of the first occupied cell along every pixel ray.
struct DepthRender {
  Tensor<double> depth;          // N x H x W
  Tensor<std::uint8_t> valid;    // hit inside [depth_min, depth_max)
};

/// `rig` is scaled to `f.stride`; `ego_to_scene` places the rig's ego frame
/// in the scene frame.
DepthRender render_depth(const OccupancyGrid& occ, const VoxelGridSpec& grid,
                         const CameraRig& rig, const RigidTransform& ego_to_scene,
                         const FrustumSpec& f);

/// Procedural N x C x H x W features of frame `frame`: value noise attached
/// to the world point each pixel sees, so views of one surface agree.
Tensor<double> render_features(const SyntheticScene& scene, int frame, const FrustumSpec& f,
                               int channels);

/// N x D x H x W logits peaked at the rendered depth of frame `frame`;
/// pixels without a valid hit get flat logits.
Tensor<double> render_depth_logits(const SyntheticScene& scene, int frame, const FrustumSpec& f);

/// Noisy head outputs that favour the ground truth: occupancy logits
/// nx x ny x nz and semantic logits K x nx x ny x nz.
std::pair<Tensor<double>, Tensor<double>> make_head_logits(const OccupancyGrid& occ,
                                                           const SemanticGrid& sem,
                                                           int num_classes, std::uint64_t seed);

/// Two 8-entry prediction sets whose de-augmented content is the ground
/// truth (occ = 1 on occupied cells, one-hot semantics; uniform semantics on
/// free cells). Each entry is stored in its augmented frame. A nested, seeded
/// subset of occupied cells of size ~corrupt_fraction has its occupancy
/// probability forced to 0.
std::pair<PredictionSet, PredictionSet> make_oracle_predictions(const SyntheticScene& scene,
                                                                int num_classes,
                                                                double corrupt_fraction,
                                                                FlipAxes axes = {});

/// Two views of a fronto-parallel textured plane at depth `depth` seen by one
/// camera (identity cam_to_ego) that translates along its x axis between the
/// frames. The baseline is chosen so the true disparity is an integer number
/// of pixels: prev(u + disparity, v) == cur(u, v).
struct TexturedPlanePair {
  FeatureMap cur;
  FeatureMap prev;
  Camera camera;
  RigidTransform prev_to_cur;
  double baseline = 0.0;
  int disparity = 0;
};

/// `disparity` < 0 picks max(4, width / 4); 0 gives identical views.
TexturedPlanePair textured_plane_features(double depth, const Intrinsics& k, int channels,
                                          std::uint64_t seed = 0, int disparity = -1);

/// Hash-based noise helpers shared with the tests.
std::uint64_t mix_hash(std::uint64_t a, std::uint64_t b);
double hash_unit(std::uint64_t key);  // [0, 1)
double value_noise(std::uint64_t seed, int channel, const Vec3& p);

}  // namespace msocc
