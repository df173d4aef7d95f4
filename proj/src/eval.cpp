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

#include "msocc/eval.hpp"

#include <string>

#include "msocc/error.hpp"

namespace msocc {

ConfusionTally::ConfusionTally(int classes, bool score_free)
    : num_classes(classes), include_free(score_free) {
  require(classes >= 0 && classes < kFreeLabel, "unsupported class count");
  const std::size_t slots = static_cast<std::size_t>(classes) + (score_free ? 1 : 0);
  tp.assign(slots, 0);
  fp.assign(slots, 0);
  fn.assign(slots, 0);
}

void ConfusionTally::merge(const ConfusionTally& other) {
  require(other.num_classes == num_classes && other.include_free == include_free,
          "cannot merge tallies with different class layouts");
  for (std::size_t c = 0; c < tp.size(); ++c) {
    tp[c] += other.tp[c];
    fp[c] += other.fp[c];
    fn[c] += other.fn[c];
  }
  voxels_evaluated += other.voxels_evaluated;
}

void accumulate(const LabelGrid& pred, const LabelGrid& gt, const CameraMask& mask,
                ConfusionTally& tally) {
  require_shape(pred, gt.shape(), "prediction");
  require_shape(mask, gt.shape(), "camera mask");
  const int k = tally.num_classes;
  const bool free_scored = tally.include_free;
  // Slot of a label, or -1 when the label is not scored.
  auto slot = [&](std::uint8_t label) -> int {
    if (label == kFreeLabel) return free_scored ? k : -1;
    if (label >= k) fail_validation("label " + std::to_string(label) + " outside the class range");
    return label;
  };

  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!mask[i]) continue;
    ++tally.voxels_evaluated;
    const int p = slot(pred[i]);
    const int g = slot(gt[i]);
    if (p == g) {
      if (p >= 0) ++tally.tp[static_cast<std::size_t>(p)];
      continue;
    }
    if (p >= 0) ++tally.fp[static_cast<std::size_t>(p)];
    if (g >= 0) ++tally.fn[static_cast<std::size_t>(g)];
  }
}

MiouReport miou(const ConfusionTally& tally) {
  MiouReport report;
  report.voxels_evaluated = tally.voxels_evaluated;
  double sum = 0.0;
  int scored = 0;
  for (std::size_t c = 0; c < tally.scored_classes(); ++c) {
    const std::uint64_t denom = tally.tp[c] + tally.fp[c] + tally.fn[c];
    if (denom == 0) {
      report.per_class_iou.emplace_back(std::nullopt);
      continue;
    }
    const double iou = static_cast<double>(tally.tp[c]) / static_cast<double>(denom);
    report.per_class_iou.emplace_back(iou);
    sum += iou;
    ++scored;
  }
  require(scored > 0, "mIoU undefined: no class has a non-zero denominator");
  report.miou = sum / scored;
  return report;
}

}  // namespace msocc
