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

// End-to-end driver over a scene directory.
//
// Input layout (T = past_frames + 1 frames, tt = two-digit frame index,
// s = stride, i = scale level):
//   config.json                         PipelineConfig (optional when passed in)
//   rig.json                            CameraRig, full-resolution intrinsics
//   poses.json                          {"ego_to_global": [T transforms]}, oldest first
//   frames/tt/feat_s<s>.msoc            N x C x H x W, s = cost stride and every lift stride
//   frames/tt/depth_logits_s<s>.msoc    N x D x H x W, tt >= 1, lift strides only
//   gt/occ.msoc gt/sem.msoc gt/mask.msoc           u8 nx x ny x nz at level 0
//   gt/depth_s<s>.msoc gt/depth_valid_s<s>.msoc    N x H x W, current frame
//   heads/occ_logits_l<i>.msoc          nx x ny x nz
//   heads/sem_logits_l<i>.msoc          K x nx x ny x nz
//   predictions/model_{a,b}/tags.json   list of AugmentationTag
//   predictions/model_{a,b}/entry_<j>_{occ,sem}.msoc   augmented-frame probabilities
//
// Output layout:
//   cost_volumes/pair_tt_s<s>.msoc      frames tt-1 -> tt, N x D x H x W
//   voxel_features/frame_tt_l<i>.msoc   pooled grid in frame tt's ego frame
//   temporal_stack_l<i>.msoc            aligned frames 1..T-1 stacked on channels
//   gt_pyramid/{occ,sem,mask}_l<i>.msoc
//   loss_report.json
//   ensemble_occ.msoc ensemble_sem.msoc final_labels.msoc
//   eval_report.json
//   run_meta.json

#include <filesystem>
#include <string>
#include <vector>

#include "msocc/eval.hpp"
#include "msocc/fixtures.hpp"
#include "msocc/geometry.hpp"
#include "msocc/json_io.hpp"
#include "msocc/losses.hpp"
#include "msocc/postprocess.hpp"
#include "msocc/temporal.hpp"

namespace msocc {

enum class WeightMode { kInverseFrequency, kUniform };

struct LossConfig {
  double gamma = kDefaultFocalGamma;
  std::vector<double> alpha = default_scale_weights(3);
  WeightMode weight_mode = WeightMode::kInverseFrequency;
};

struct PipelineConfig {
  int num_classes = kNumClasses;
  int past_frames = 8;
  int feature_channels = 0;            // 0 = take from the inputs
  FrustumSpec cost_frustum;            // stride 4
  std::vector<FrustumSpec> lift_frustums;  // strides 8, 16, 32 -> levels 0, 1, 2
  std::vector<VoxelGridSpec> grids;        // level i
  LossConfig loss;
  FlipAxes tta_axes;
  EnsembleConfig ensemble;
  std::string threshold_table;         // empty = built-in table
  WarpMode warp_mode = WarpMode::kTrilinear;
  bool eval_include_free = false;

  /// Strides 4 / 8, 16, 32 for the given full image size, depth bins
  /// 1 m .. 60 m every metre, and `full_grid` halved twice.
  static PipelineConfig defaults(int image_width, int image_height,
                                 const VoxelGridSpec& full_grid = VoxelGridSpec::full_default());
  void validate() const;
  std::size_t levels() const { return grids.size(); }
};

void to_json(Json& j, const PipelineConfig& c);
void from_json(const Json& j, PipelineConfig& c);

struct PipelineSummary {
  LossReport loss;
  MiouReport eval;
};

/// Runs every stage and writes the output layout above. Errors are rethrown
/// with the failing stage prefixed to the message.
PipelineSummary run_pipeline(const PipelineConfig& config, const std::filesystem::path& input_dir,
                             const std::filesystem::path& output_dir);

struct SynthOptions {
  int cameras = 6;
  int image_width = 256;
  int image_height = 128;
  int channels = 8;
  int boxes = 8;
  std::uint64_t seed = 0;
  double corrupt_fraction = 0.0;
  bool static_ego = false;
  VoxelGridSpec grid = small_grid();

  /// 64 x 64 x 8 cells of 0.8 m around the ego vehicle.
  static VoxelGridSpec small_grid();
};

/// Builds a synthetic scene and writes it in the input layout, including
/// oracle predictions and config.json.
PipelineConfig write_synthetic_inputs(const SynthOptions& options, const std::filesystem::path& dir);

/// Name of frame `t` in the directory layouts ("00", "01", ...).
std::string frame_name(int t);

/// A directory holding tags.json (one tag per entry, in order) and
/// entry_<j>_occ.msoc / entry_<j>_sem.msoc for each entry.
PredictionSet read_prediction_set(const std::filesystem::path& dir);
void write_prediction_set(const std::filesystem::path& dir, const PredictionSet& set);

}  // namespace msocc
