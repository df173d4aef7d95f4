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

#include "msocc/gt_multiscale.hpp"

#include <algorithm>
#include <atomic>
#include <string>

#include "msocc/error.hpp"

namespace msocc {
namespace {

void require_even_grid(const Tensor<std::uint8_t>& t, const char* name) {
  require(t.rank() == 3, std::string(name) + " must be nx x ny x nz");
  require(t.dim(0) % 2 == 0 && t.dim(1) % 2 == 0 && t.dim(2) % 2 == 0,
          std::string(name) + " has odd dimensions " + shape_to_string(t.shape()));
}

Shape halved(const Shape& s) { return {s[0] / 2, s[1] / 2, s[2] / 2}; }

// Visits the 8 children of every coarse cell; reduce(children) -> value.
template <typename Reduce>
Tensor<std::uint8_t> block_reduce(const Tensor<std::uint8_t>& fine, Reduce reduce) {
  const std::size_t ny = fine.dim(1), nz = fine.dim(2);
  const Shape coarse_shape = halved(fine.shape());
  Tensor<std::uint8_t> out(coarse_shape);
  const std::size_t cx = coarse_shape[0], cy = coarse_shape[1], cz = coarse_shape[2];
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t bx = 0; bx < static_cast<std::ptrdiff_t>(cx); ++bx) {
    std::array<std::uint8_t, 8> children{};
    for (std::size_t by = 0; by < cy; ++by) {
      for (std::size_t bz = 0; bz < cz; ++bz) {
        int n = 0;
        for (std::size_t dx = 0; dx < 2; ++dx)
          for (std::size_t dy = 0; dy < 2; ++dy)
            for (std::size_t dz = 0; dz < 2; ++dz) {
              const std::size_t x = 2 * static_cast<std::size_t>(bx) + dx;
              children[n++] = fine[(x * ny + 2 * by + dy) * nz + 2 * bz + dz];
            }
        const std::size_t flat = (static_cast<std::size_t>(bx) * cy + by) * cz + bz;
        out[flat] = reduce(children, flat);
      }
    }
  }
  return out;
}

}  // namespace

void check_semantic_consistency(const OccupancyGrid& occ, const SemanticGrid& sem) {
  require(occ.shape() == sem.shape(), "occupancy and semantic grids differ in shape");
  for (std::size_t i = 0; i < occ.size(); ++i) {
    require(occ[i] <= 1, "occupancy values must be 0 or 1");
    require((occ[i] == 0) == (sem[i] == kFreeLabel),
            "semantic grid must be free exactly where occupancy is 0 (cell " +
                std::to_string(i) + ")");
  }
}

OccupancyGrid downsample_occ(const OccupancyGrid& occ) {
  require_even_grid(occ, "occupancy grid");
  return block_reduce(occ, [](const std::array<std::uint8_t, 8>& ch, std::size_t) {
    return *std::max_element(ch.begin(), ch.end());
  });
}

SemanticGrid downsample_sem(const SemanticGrid& sem, const OccupancyGrid& occ_coarse) {
  require_even_grid(sem, "semantic grid");
  require_shape(occ_coarse, halved(sem.shape()), "coarse occupancy");
  std::atomic<bool> orphan{false};
  auto out = block_reduce(sem, [&](const std::array<std::uint8_t, 8>& ch, std::size_t flat) {
    if (occ_coarse[flat] == 0) return kFreeLabel;
    std::uint8_t best = kFreeLabel;
    int best_count = 0;
    for (const std::uint8_t label : ch) {
      if (label == kFreeLabel) continue;
      const int count = static_cast<int>(std::count(ch.begin(), ch.end(), label));
      if (count > best_count || (count == best_count && label < best)) {
        best = label;
        best_count = count;
      }
    }
    if (best_count == 0) orphan.store(true, std::memory_order_relaxed);
    return best;
  });
  require(!orphan.load(), "occupied coarse cell has no labelled children; occupancy and semantics disagree");
  return out;
}

CameraMask downsample_mask(const CameraMask& mask) {
  require_even_grid(mask, "camera mask");
  return block_reduce(mask, [](const std::array<std::uint8_t, 8>& ch, std::size_t) {
    return static_cast<std::uint8_t>(
        std::any_of(ch.begin(), ch.end(), [](std::uint8_t v) { return v != 0; }) ? 1 : 0);
  });
}

MultiScaleGT build_pyramid(const OccupancyGrid& occ, const SemanticGrid& sem,
                           const CameraMask& mask, int level_count) {
  require(level_count >= 1, "pyramid needs at least one level");
  check_semantic_consistency(occ, sem);
  require(mask.shape() == occ.shape(), "camera mask shape differs from occupancy");
  MultiScaleGT gt;
  gt.levels.push_back(GtLevel{occ, sem, mask});
  for (int i = 1; i < level_count; ++i) {
    const GtLevel& fine = gt.levels.back();
    GtLevel coarse;
    coarse.occ = downsample_occ(fine.occ);
    coarse.sem = downsample_sem(fine.sem, coarse.occ);
    coarse.mask = downsample_mask(fine.mask);
    gt.levels.push_back(std::move(coarse));
  }
  return gt;
}

}  // namespace msocc
