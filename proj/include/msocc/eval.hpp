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

#include <cstdint>
#include <optional>
#include <vector>

#include "msocc/gt_multiscale.hpp"

namespace msocc {

/// Per-class TP / FP / FN counters over camera-visible voxels. When
/// `include_free` is set, kFreeLabel is scored as an extra class with index
/// num_classes.
struct ConfusionTally {
  int num_classes = 0;
  bool include_free = false;
  std::vector<std::uint64_t> tp, fp, fn;
  std::uint64_t voxels_evaluated = 0;

  explicit ConfusionTally(int classes = 0, bool score_free = false);

  std::size_t scored_classes() const { return tp.size(); }
  void merge(const ConfusionTally& other);
};

void accumulate(const LabelGrid& pred, const LabelGrid& gt, const CameraMask& mask,
                ConfusionTally& tally);

struct MiouReport {
  /// nullopt for classes with TP + FP + FN = 0 (excluded from the mean).
  std::vector<std::optional<double>> per_class_iou;
  double miou = 0.0;
  std::uint64_t voxels_evaluated = 0;
};

MiouReport miou(const ConfusionTally& tally);

}  // namespace msocc
