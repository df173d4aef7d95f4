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

// Straightforward single-threaded versions of the production kernels. They
// share no code paths with the optimised implementations beyond the basic
// geometry helpers, so the unit tests can compare the two directly.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "msocc/eval.hpp"
#include "msocc/geometry.hpp"
#include "msocc/gt_multiscale.hpp"
#include "msocc/lift_splat.hpp"
#include "msocc/postprocess.hpp"
#include "msocc/tensor.hpp"

namespace msocc::reference {

/// Scatter-add of every frustum point into its cell, point by point.
Tensor<double> lift_scatter(const CameraRig& rig, const FrustumSpec& f, const VoxelGridSpec& g,
                            std::span<const FeatureMap> features,
                            std::span<const DepthDistribution> depths);

/// Per-channel sum of feature * probability over the points that land in the grid.
std::vector<double> in_bounds_mass(const CameraRig& rig, const FrustumSpec& f,
                                   const VoxelGridSpec& g, std::span<const FeatureMap> features,
                                   std::span<const DepthDistribution> depths);

/// Per pixel and bin: reproject, sample the previous map, channel-mean dot product.
Tensor<double> cost_volume(const FeatureMap& cur, const FeatureMap& prev,
                           const RigidTransform& prev_to_cur, const Camera& camera,
                           const FrustumSpec& f);

OccupancyGrid block_max(const OccupancyGrid& occ);
CameraMask block_or(const CameraMask& mask);
SemanticGrid block_majority(const SemanticGrid& sem, const OccupancyGrid& occ_coarse);

/// Samples the eight neighbours around each back-transformed cell centre.
Tensor<double> trilinear_warp(const Tensor<double>& values, const VoxelGridSpec& g,
                              const RigidTransform& prev_to_cur);

EnsembleResult ensemble_loop(const PredictionSet& a, const PredictionSet& b,
                             const EnsembleConfig& cfg);

ConfusionTally confusion_loop(const LabelGrid& pred, const LabelGrid& gt, const CameraMask& mask,
                              int num_classes, bool include_free);

/// Mean binned cross-entropy over valid pixels, computed with log-sum-exp per pixel.
double depth_cross_entropy(const Tensor<double>& logits, const Tensor<double>& gt_depth,
                           const Tensor<std::uint8_t>& valid, const FrustumSpec& f);

/// Central difference (f(x + h e_i) - f(x - h e_i)) / 2h for every coordinate.
std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& fn,
                                       std::vector<double> x, double h = 1e-6);

}  // namespace msocc::reference
