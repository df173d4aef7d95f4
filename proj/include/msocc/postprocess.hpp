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

// Test-time augmentation, two-model ensembling and class-wise occupancy
// thresholds.

#include <array>
#include <compare>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "msocc/gt_multiscale.hpp"
#include "msocc/tensor.hpp"

namespace msocc {

inline constexpr int kNumClasses = 17;

/// Class names indexed by label id.
inline constexpr std::array<std::string_view, kNumClasses> kClassNames{
    "Others",     "Barrier",    "Bicycle",           "Bus",        "Car",
    "Construction Vehicle",     "Motorcycle",        "Pedestrian", "Traffic Cone",
    "Trailer",    "Truck",      "Driveable Surface", "Other Flat", "Sidewalk",
    "Terrain",    "Manmade",    "Vegetation"};

struct AugmentationTag {
  bool img_hflip = false;
  bool vox_flip_x = false;
  bool vox_flip_y = false;

  friend auto operator<=>(const AugmentationTag&, const AugmentationTag&) = default;
};

/// All eight combinations, binary counting with img_hflip as the most
/// significant bit. The first tag is the identity.
std::array<AugmentationTag, 8> enumerate_tta();

/// Grid axes that the "horizontal" and "vertical" voxel flips reverse.
struct FlipAxes {
  int horizontal = 0;  // x
  int vertical = 1;    // y
};

/// Probabilities of one augmented inference: occ is nx x ny x nz, sem is
/// K x nx x ny x nz with rows summing to 1.
struct PredictionEntry {
  AugmentationTag tag;
  Tensor<double> occ;
  Tensor<double> sem;
};

struct PredictionSet {
  std::vector<PredictionEntry> entries;
};

/// Reverses grid axis `axis` (0, 1, 2) of an nx x ny x nz volume, or of every
/// channel when the tensor has a leading channel axis.
template <typename T>
Tensor<T> flip_grid_axis(const Tensor<T>& t, int axis);

/// Applies the tag's voxel flips (x then y). The image flip changes only the
/// 2D network input, so it has no volume-space counterpart.
PredictionEntry apply_flips(const PredictionEntry& entry, FlipAxes axes = {});

/// Maps an augmented prediction back to the canonical frame. Voxel flips are
/// involutions, so this is apply_flips again.
PredictionEntry deaugment(const PredictionEntry& entry, FlipAxes axes = {});

struct EnsembleConfig {
  double weight_a = 0.45;
  double weight_b = 0.55;
};

struct EnsembleResult {
  Tensor<double> occ;  // nx x ny x nz
  LabelGrid sem;       // argmax class per voxel
};

/// Weighted mean of both models' canonical-frame predictions:
///   occ = (w_a * sum_a occ + w_b * sum_b occ) / (w_a * |a| + w_b * |b|)
/// and the argmax of the identically weighted semantic sum (ties to the
/// smallest class id). Each set is summed in tag order.
EnsembleResult ensemble(const PredictionSet& a, const PredictionSet& b,
                        const EnsembleConfig& cfg = {});

class ThresholdTable {
 public:
  ThresholdTable() = default;
  explicit ThresholdTable(std::vector<double> thresholds);

  /// Per-class occupancy thresholds of the shipped post-processing table.
  static ThresholdTable default_table();

  double threshold(std::uint8_t label) const;
  std::size_t size() const { return thresholds_.size(); }
  const std::vector<double>& values() const { return thresholds_; }

 private:
  std::vector<double> thresholds_;
};

/// Reads a JSON object mapping every class name of kClassNames to a
/// threshold in (0, 1).
ThresholdTable load_threshold_table(const std::filesystem::path& path);
ThresholdTable parse_threshold_table(std::string_view json_text);

/// Label, or kFreeLabel where occ < threshold[label].
LabelGrid apply_thresholds(const Tensor<double>& occ, const LabelGrid& sem,
                           const ThresholdTable& table);

}  // namespace msocc
