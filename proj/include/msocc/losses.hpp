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

// Masked occupancy BCE, masked multi-class focal loss, binned depth
// cross-entropy and the scale-weighted total. Every loss is the mean over its
// contributing voxels / pixels and comes with the exact gradient with respect
// to its logits.

#include <array>
#include <span>
#include <vector>

#include "msocc/geometry.hpp"
#include "msocc/gt_multiscale.hpp"
#include "msocc/tensor.hpp"

namespace msocc {

inline constexpr double kFrequencyFloor = 1e-6;
inline constexpr double kDefaultFocalGamma = 2.0;

struct ClassWeights {
  std::array<double, 2> occ{1.0, 1.0};  // {unoccupied, occupied}
  std::vector<double> sem;

  static ClassWeights uniform(int num_classes);
  ClassWeights scaled(double factor) const;
};

/// Inverse class frequency over the masked voxels, each weight vector
/// normalised to mean 1. Semantic frequencies are taken over masked occupied
/// voxels; a class that never occurs gets 1 / kFrequencyFloor before
/// normalisation.
ClassWeights class_frequency_weights(const SemanticGrid& sem, const OccupancyGrid& occ,
                                     const CameraMask& mask, int num_classes);

struct LossValue {
  double value = 0.0;
  Tensor<double> gradient;  // same shape as the logits
};

/// mean over masked voxels of w[gt] * BCE(sigmoid(z), gt).
LossValue bce_occ_loss(const Tensor<double>& occ_logits, const OccupancyGrid& gt,
                       const CameraMask& mask, const ClassWeights& weights);

/// mean over masked occupied voxels of w[gt] * (1 - p_gt)^gamma * -log(p_gt),
/// with p the softmax over the leading (class) axis of K x nx x ny x nz logits.
LossValue focal_sem_loss(const Tensor<double>& sem_logits, const SemanticGrid& gt,
                         const OccupancyGrid& occ_gt, const CameraMask& mask,
                         const ClassWeights& weights, double gamma = kDefaultFocalGamma);

/// Cross-entropy between the per-pixel softmax over depth bins and the bin
/// holding the ground-truth depth, averaged over valid pixels. Accepts
/// D x H x W logits with H x W targets, or N x D x H x W with N x H x W.
LossValue depth_loss(const Tensor<double>& depth_logits, const Tensor<double>& gt_depth,
                     const Tensor<std::uint8_t>& valid, const FrustumSpec& f);

struct ScaleLoss {
  double occ = 0.0;
  double sem = 0.0;
  double depth = 0.0;

  double total() const { return occ + sem + depth; }
};

struct LossReport {
  std::vector<ScaleLoss> scales;
  std::vector<double> scale_totals;  // L_i
  std::vector<double> alpha;
  double total = 0.0;
};

/// alpha_i = 1 / 2^i.
std::vector<double> default_scale_weights(int scale_count = 3);

LossReport total_loss(std::span<const ScaleLoss> scales);
LossReport total_loss(std::span<const ScaleLoss> scales, std::span<const double> alpha);

}  // namespace msocc
