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

// Per-scale ground truth: max-pooled occupancy, majority-vote semantics and
// OR-reduced camera masks. Level 0 is the finest grid.

#include <array>
#include <cstdint>
#include <vector>

#include "msocc/tensor.hpp"

namespace msocc {

/// Label value of unoccupied voxels in semantic and prediction grids.
inline constexpr std::uint8_t kFreeLabel = 255;

/// nx x ny x nz grids. Occupancy holds {0, 1}, masks {0, 1}, semantics class
/// ids or kFreeLabel.
using OccupancyGrid = Tensor<std::uint8_t>;
using SemanticGrid = Tensor<std::uint8_t>;
using CameraMask = Tensor<std::uint8_t>;
using LabelGrid = Tensor<std::uint8_t>;

/// Throws unless `sem` is kFreeLabel exactly where `occ` is 0.
void check_semantic_consistency(const OccupancyGrid& occ, const SemanticGrid& sem);

OccupancyGrid downsample_occ(const OccupancyGrid& occ);

/// Majority vote over the non-free children of every occupied coarse cell;
/// ties go to the smallest label id. Unoccupied coarse cells become free.
SemanticGrid downsample_sem(const SemanticGrid& sem, const OccupancyGrid& occ_coarse);

CameraMask downsample_mask(const CameraMask& mask);

struct GtLevel {
  OccupancyGrid occ;
  SemanticGrid sem;
  CameraMask mask;
};

struct MultiScaleGT {
  std::vector<GtLevel> levels;  // levels[0] is the input resolution
};

MultiScaleGT build_pyramid(const OccupancyGrid& occ, const SemanticGrid& sem,
                           const CameraMask& mask, int level_count = 3);

}  // namespace msocc
