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

// Command-line driver. Every subcommand reads its inputs from files, writes
// its outputs to files, and prints a JSON record of the parameters it used.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "msocc/error.hpp"
#include "msocc/eval.hpp"
#include "msocc/gt_multiscale.hpp"
#include "msocc/json_io.hpp"
#include "msocc/lift_splat.hpp"
#include "msocc/losses.hpp"
#include "msocc/parallel.hpp"
#include "msocc/pipeline.hpp"
#include "msocc/postprocess.hpp"
#include "msocc/temporal.hpp"
#include "msocc/tensor_io.hpp"

namespace fs = std::filesystem;
using namespace msocc;

namespace {

struct DepthRange {
  double min = 1.0;
  double max = 60.0;
  double step = 1.0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--depth-min", min, "Nearest depth bin edge in metres")->capture_default_str();
    cmd->add_option("--depth-max", max, "Farthest depth bin edge in metres")->capture_default_str();
    cmd->add_option("--depth-step", step, "Depth bin width in metres")->capture_default_str();
  }
  FrustumSpec frustum(std::size_t width, std::size_t height, int stride) const {
    return FrustumSpec{static_cast<int>(width), static_cast<int>(height), stride, min, max, step};
  }
  Json to_json() const { return {{"depth_min", min}, {"depth_max", max}, {"depth_step", step}}; }
};

void emit(const Json& record) { std::cout << record.dump(2) << std::endl; }

int parse_axis_flag(const std::string& s) {
  if (s == "x") return 0;
  if (s == "y") return 1;
  if (s == "z") return 2;
  fail_validation("unknown axis \"" + s + "\"");
}

std::vector<Tensor<double>> per_camera(const Tensor<double>& t, const std::string& what) {
  require(t.rank() == 4, what + ": expected N x C x H x W, got " + shape_to_string(t.shape()));
  std::vector<Tensor<double>> out;
  const Shape inner(t.shape().begin() + 1, t.shape().end());
  for (std::size_t n = 0; n < t.dim(0); ++n) {
    const auto s = t.slab(n);
    out.emplace_back(inner, std::vector<double>(s.begin(), s.end()));
  }
  return out;
}

Tensor<double> stack_cameras(const std::vector<Tensor<double>>& parts) {
  Shape shape{parts.size()};
  shape.insert(shape.end(), parts.front().shape().begin(), parts.front().shape().end());
  std::vector<double> data;
  for (const auto& p : parts) data.insert(data.end(), p.storage().begin(), p.storage().end());
  return Tensor<double>(std::move(shape), std::move(data));
}

RigidTransform single_pose(const fs::path& path) {
  const auto poses = load_poses(path);
  require(poses.size() == 1, path.string() + ": expected exactly one transform");
  return poses.front();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-scale occupancy pipeline tools"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 keeps the runtime default)")
      ->check(CLI::NonNegativeNumber);

  std::function<void()> action;

  // synth
  SynthOptions synth;
  std::string synth_out;
  {
    auto* cmd = app.add_subcommand("synth", "Write a synthetic fixture scene as pipeline inputs");
    cmd->add_option("--out", synth_out, "Output directory")->required();
    cmd->add_option("--seed", synth.seed)->capture_default_str();
    cmd->add_option("--cameras", synth.cameras)->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--width", synth.image_width, "Full image width")->capture_default_str();
    cmd->add_option("--height", synth.image_height, "Full image height")->capture_default_str();
    cmd->add_option("--channels", synth.channels)->capture_default_str();
    cmd->add_option("--boxes", synth.boxes)->capture_default_str();
    cmd->add_option("--corrupt-fraction", synth.corrupt_fraction,
                    "Fraction of voxels whose oracle predictions are replaced")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_flag("--static-ego", synth.static_ego, "Keep the ego vehicle still across frames");
    cmd->callback([&] {
      action = [&] {
        const PipelineConfig cfg = write_synthetic_inputs(synth, synth_out);
        emit({{"command", "synth"},
              {"out", synth_out},
              {"seed", synth.seed},
              {"cameras", synth.cameras},
              {"width", synth.image_width},
              {"height", synth.image_height},
              {"channels", synth.channels},
              {"boxes", synth.boxes},
              {"corrupt_fraction", synth.corrupt_fraction},
              {"static_ego", synth.static_ego},
              {"config", cfg}});
      };
    });
  }

  // cost-volume
  struct {
    std::string cur, prev, rig, pose_prev, pose_cur, out;
    int stride = 4;
    std::vector<int> rescale;
    DepthRange depth;
  } cv;
  {
    auto* cmd = app.add_subcommand("cost-volume", "Build per-camera cost volumes between two frames");
    cmd->add_option("--cur", cv.cur, "Current features, N x C x H x W")->required();
    cmd->add_option("--prev", cv.prev, "Previous features, N x C x H x W")->required();
    cmd->add_option("--rig", cv.rig, "Rig JSON with full-resolution intrinsics")->required();
    cmd->add_option("--pose-prev", cv.pose_prev, "Ego-to-global pose of the previous frame")->required();
    cmd->add_option("--pose-cur", cv.pose_cur, "Ego-to-global pose of the current frame")->required();
    cmd->add_option("--stride", cv.stride, "Feature stride")->capture_default_str();
    cmd->add_option("--rescale-stride", cv.rescale, "Also write average-pooled copies at these strides");
    cmd->add_option("--out", cv.out, "Output tensor, N x D x H x W")->required();
    cv.depth.add_to(cmd);
    cmd->callback([&] {
      action = [&] {
        const auto cur = per_camera(read_real_tensor(cv.cur), cv.cur);
        const auto prev = per_camera(read_real_tensor(cv.prev), cv.prev);
        const CameraRig rig = load_rig(cv.rig).scaled(cv.stride);
        require(cur.size() == rig.size() && prev.size() == rig.size(), "camera count differs from rig");
        const RigidTransform motion = relative_ego_motion(single_pose(cv.pose_prev), single_pose(cv.pose_cur));
        const FrustumSpec f = cv.depth.frustum(cur[0].dim(2), cur[0].dim(1), cv.stride);
        std::vector<CostVolume> volumes;
        for (std::size_t c = 0; c < rig.size(); ++c) {
          volumes.push_back(build_cost_volume(FeatureMap{cur[c], cv.stride}, FeatureMap{prev[c], cv.stride},
                                              motion, rig.cameras[c], f));
        }
        auto write_all = [&](const std::vector<CostVolume>& vs, const fs::path& path) {
          std::vector<Tensor<double>> parts;
          for (const auto& v : vs) parts.push_back(v.values);
          write_f32(path, stack_cameras(parts));
        };
        write_all(volumes, cv.out);
        Json extra = Json::array();
        for (int s : cv.rescale) {
          std::vector<CostVolume> pooled;
          for (const auto& v : volumes) pooled.push_back(rescale_cost_volume(v, s));
          fs::path path = cv.out;
          path.replace_filename(path.stem().string() + "_s" + std::to_string(s) + path.extension().string());
          write_all(pooled, path);
          extra.push_back(path.string());
        }
        Json rec{{"command", "cost-volume"}, {"out", cv.out}, {"stride", cv.stride},
                 {"rescale_stride", cv.rescale}, {"rescaled_outputs", extra}, {"depth_bins", f.depth_bins()}};
        rec.update(cv.depth.to_json());
        emit(rec);
      };
    });
  }

  // lift
  struct {
    std::string features, logits, rig, grid, out;
    int stride = 8;
    DepthRange depth;
  } lift;
  {
    auto* cmd = app.add_subcommand("lift", "Lift camera features into a voxel grid");
    cmd->add_option("--features", lift.features, "Features, N x C x H x W")->required();
    cmd->add_option("--depth-logits", lift.logits, "Depth logits, N x D x H x W")->required();
    cmd->add_option("--rig", lift.rig, "Rig JSON with full-resolution intrinsics")->required();
    cmd->add_option("--grid", lift.grid, "Voxel grid JSON")->required();
    cmd->add_option("--stride", lift.stride, "Feature stride")->capture_default_str();
    cmd->add_option("--out", lift.out, "Output tensor, C x nx x ny x nz")->required();
    lift.depth.add_to(cmd);
    cmd->callback([&] {
      action = [&] {
        const auto feats = per_camera(read_real_tensor(lift.features), lift.features);
        const auto logits = per_camera(read_real_tensor(lift.logits), lift.logits);
        const CameraRig rig = load_rig(lift.rig).scaled(lift.stride);
        const VoxelGridSpec grid = load_grid(lift.grid);
        require(feats.size() == rig.size() && logits.size() == rig.size(), "camera count differs from rig");
        const FrustumSpec f = lift.depth.frustum(feats[0].dim(2), feats[0].dim(1), lift.stride);
        std::vector<FeatureMap> maps;
        std::vector<DepthDistribution> depths;
        for (std::size_t c = 0; c < rig.size(); ++c) {
          maps.push_back(FeatureMap{feats[c], lift.stride});
          depths.push_back(normalize_depth_logits(logits[c]));
        }
        const PoolingIndex index = build_pooling_index(rig, f, grid);
        write_f32(lift.out, lift_and_pool(maps, depths, index).values);
        Json rec{{"command", "lift"}, {"out", lift.out}, {"stride", lift.stride},
                 {"entries", index.entries.size()}, {"occupied_cells", index.interval_count()}};
        rec.update(lift.depth.to_json());
        emit(rec);
      };
    });
  }

  // warp
  struct {
    std::string in, grid, pose_prev, pose_cur, mode = "trilinear", out;
  } warp;
  {
    auto* cmd = app.add_subcommand("warp", "Align a voxel feature grid from a past frame to the current one");
    cmd->add_option("--in", warp.in, "Voxel features, C x nx x ny x nz")->required();
    cmd->add_option("--grid", warp.grid, "Voxel grid JSON")->required();
    cmd->add_option("--pose-prev", warp.pose_prev, "Ego-to-global pose of the source frame")->required();
    cmd->add_option("--pose-cur", warp.pose_cur, "Ego-to-global pose of the target frame")->required();
    cmd->add_option("--mode", warp.mode)->capture_default_str()->check(CLI::IsMember({"nearest", "trilinear"}));
    cmd->add_option("--out", warp.out)->required();
    cmd->callback([&] {
      action = [&] {
        const VoxelFeatureGrid src{read_real_tensor(warp.in), load_grid(warp.grid)};
        const RigidTransform motion = relative_ego_motion(single_pose(warp.pose_prev), single_pose(warp.pose_cur));
        const WarpMode mode = warp.mode == "nearest" ? WarpMode::kNearest : WarpMode::kTrilinear;
        write_f32(warp.out, warp_voxel_grid(src, motion, mode).values);
        emit({{"command", "warp"}, {"out", warp.out}, {"mode", warp.mode}});
      };
    });
  }

  // gt-downsample
  struct {
    std::string occ, sem, mask, out;
    int levels = 3;
  } gtd;
  {
    auto* cmd = app.add_subcommand("gt-downsample", "Build the multi-scale ground-truth pyramid");
    cmd->add_option("--occ", gtd.occ)->required();
    cmd->add_option("--sem", gtd.sem)->required();
    cmd->add_option("--mask", gtd.mask)->required();
    cmd->add_option("--levels", gtd.levels)->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--out", gtd.out, "Output directory")->required();
    cmd->callback([&] {
      action = [&] {
        const auto pyramid = build_pyramid(read_tensor_as<std::uint8_t>(gtd.occ), read_tensor_as<std::uint8_t>(gtd.sem),
                                           read_tensor_as<std::uint8_t>(gtd.mask), gtd.levels);
        Json shapes = Json::array();
        for (std::size_t l = 0; l < pyramid.levels.size(); ++l) {
          const fs::path dir = gtd.out;
          const std::string tag = "_l" + std::to_string(l) + ".msoc";
          write_tensor(dir / ("occ" + tag), pyramid.levels[l].occ);
          write_tensor(dir / ("sem" + tag), pyramid.levels[l].sem);
          write_tensor(dir / ("mask" + tag), pyramid.levels[l].mask);
          shapes.push_back(pyramid.levels[l].occ.shape());
        }
        emit({{"command", "gt-downsample"}, {"out", gtd.out}, {"levels", gtd.levels}, {"shapes", shapes}});
      };
    });
  }

  // loss
  struct {
    std::string occ, sem, mask, config, out;
    std::vector<std::string> occ_logits, sem_logits, depth_logits, gt_depth, depth_valid;
    std::vector<int> strides;
    int num_classes = kNumClasses;
    DepthRange depth;
  } loss;
  {
    auto* cmd = app.add_subcommand("loss", "Evaluate the multi-scale loss stack");
    cmd->add_option("--occ", loss.occ, "Full-resolution occupancy GT")->required();
    cmd->add_option("--sem", loss.sem, "Full-resolution semantic GT")->required();
    cmd->add_option("--mask", loss.mask, "Full-resolution camera mask")->required();
    cmd->add_option("--occ-logits", loss.occ_logits, "Occupancy logits, one per scale, finest first")->required();
    cmd->add_option("--sem-logits", loss.sem_logits, "Semantic logits K x grid, one per scale")->required();
    cmd->add_option("--depth-logits", loss.depth_logits, "Depth logits N x D x H x W, one per scale");
    cmd->add_option("--gt-depth", loss.gt_depth, "Depth GT N x H x W, one per scale");
    cmd->add_option("--depth-valid", loss.depth_valid, "Depth validity N x H x W (u8), one per scale");
    cmd->add_option("--stride", loss.strides, "Feature stride per scale");
    cmd->add_option("--num-classes", loss.num_classes)->capture_default_str();
    cmd->add_option("--config", loss.config, "Loss config JSON {gamma, alpha, weight_mode}");
    cmd->add_option("--out", loss.out, "Output JSON report")->required();
    loss.depth.add_to(cmd);
    cmd->callback([&] {
      action = [&] {
        const std::size_t scales = loss.occ_logits.size();
        require(loss.sem_logits.size() == scales, "one --sem-logits per --occ-logits is required");
        const bool with_depth = !loss.depth_logits.empty();
        if (with_depth) {
          require(loss.depth_logits.size() == scales && loss.gt_depth.size() == scales &&
                      loss.depth_valid.size() == scales,
                  "--depth-logits, --gt-depth and --depth-valid need one entry per scale");
        }
        if (!loss.strides.empty()) require(loss.strides.size() == scales, "one --stride per scale is required");
        LossConfig cfg;
        cfg.alpha = default_scale_weights(static_cast<int>(scales));
        if (!loss.config.empty()) {
          const Json j = read_json_file(loss.config);
          cfg.gamma = j.value("gamma", cfg.gamma);
          if (j.contains("alpha")) cfg.alpha = json_as<std::vector<double>>(j.at("alpha"), loss.config + ": alpha");
          const std::string mode = j.value("weight_mode", std::string("inverse_frequency"));
          require(mode == "inverse_frequency" || mode == "uniform", "unknown weight_mode \"" + mode + "\"");
          cfg.weight_mode = mode == "uniform" ? WeightMode::kUniform : WeightMode::kInverseFrequency;
        }
        const auto pyramid = build_pyramid(read_tensor_as<std::uint8_t>(loss.occ), read_tensor_as<std::uint8_t>(loss.sem),
                                           read_tensor_as<std::uint8_t>(loss.mask), static_cast<int>(scales));
        std::vector<ScaleLoss> parts;
        for (std::size_t i = 0; i < scales; ++i) {
          const GtLevel& g = pyramid.levels[i];
          const ClassWeights w = cfg.weight_mode == WeightMode::kUniform
                                     ? ClassWeights::uniform(loss.num_classes)
                                     : class_frequency_weights(g.sem, g.occ, g.mask, loss.num_classes);
          ScaleLoss s;
          s.occ = bce_occ_loss(read_real_tensor(loss.occ_logits[i]), g.occ, g.mask, w).value;
          s.sem = focal_sem_loss(read_real_tensor(loss.sem_logits[i]), g.sem, g.occ, g.mask, w, cfg.gamma).value;
          if (with_depth) {
            const auto logits = read_real_tensor(loss.depth_logits[i]);
            require(logits.rank() >= 3, loss.depth_logits[i] + ": expected D x H x W or N x D x H x W");
            const int stride = loss.strides.empty() ? 8 << i : loss.strides[i];
            const FrustumSpec f = loss.depth.frustum(logits.dim(logits.rank() - 1), logits.dim(logits.rank() - 2), stride);
            s.depth = depth_loss(logits, read_real_tensor(loss.gt_depth[i]),
                                 read_tensor_as<std::uint8_t>(loss.depth_valid[i]), f).value;
          }
          parts.push_back(s);
        }
        Json report = total_loss(parts, cfg.alpha);
        report["gamma"] = cfg.gamma;
        report["weight_mode"] = cfg.weight_mode == WeightMode::kUniform ? "uniform" : "inverse_frequency";
        report["num_classes"] = loss.num_classes;
        report["depth"] = loss.depth.to_json();
        write_json_file(loss.out, report);
        emit({{"command", "loss"}, {"out", loss.out}, {"report", report}});
      };
    });
  }

  // tta-enumerate
  {
    auto* cmd = app.add_subcommand("tta-enumerate", "Print the eight test-time augmentation tags");
    cmd->callback([&] {
      action = [&] {
        Json tags = Json::array();
        for (const auto& t : enumerate_tta()) tags.push_back(t);
        emit({{"command", "tta-enumerate"}, {"tags", tags}});
      };
    });
  }

  // deaug
  struct {
    std::string in, out, horizontal = "x", vertical = "y";
  } deaug;
  {
    auto* cmd = app.add_subcommand("deaug", "Undo the flips of every entry of a prediction set");
    cmd->add_option("--in", deaug.in, "Prediction-set directory")->required();
    cmd->add_option("--out", deaug.out, "Output prediction-set directory")->required();
    cmd->add_option("--horizontal-axis", deaug.horizontal)->capture_default_str()->check(CLI::IsMember({"x", "y", "z"}));
    cmd->add_option("--vertical-axis", deaug.vertical)->capture_default_str()->check(CLI::IsMember({"x", "y", "z"}));
    cmd->callback([&] {
      action = [&] {
        const FlipAxes axes{parse_axis_flag(deaug.horizontal), parse_axis_flag(deaug.vertical)};
        PredictionSet out;
        for (const auto& e : read_prediction_set(deaug.in).entries) out.entries.push_back(deaugment(e, axes));
        for (auto& e : out.entries) e.tag = AugmentationTag{};
        write_prediction_set(deaug.out, out);
        emit({{"command", "deaug"}, {"out", deaug.out}, {"entries", out.entries.size()},
              {"horizontal_axis", deaug.horizontal}, {"vertical_axis", deaug.vertical}});
      };
    });
  }

  // ensemble
  struct {
    std::string a, b, out_occ, out_sem;
    EnsembleConfig cfg;
  } ens;
  {
    auto* cmd = app.add_subcommand("ensemble", "Fuse two de-augmented prediction sets");
    cmd->add_option("--a", ens.a, "Prediction-set directory of the first model")->required();
    cmd->add_option("--b", ens.b, "Prediction-set directory of the second model")->required();
    cmd->add_option("--weight-a", ens.cfg.weight_a)->capture_default_str();
    cmd->add_option("--weight-b", ens.cfg.weight_b)->capture_default_str();
    cmd->add_option("--out-occ", ens.out_occ, "Fused occupancy probabilities")->required();
    cmd->add_option("--out-sem", ens.out_sem, "Fused argmax labels (u8)")->required();
    cmd->callback([&] {
      action = [&] {
        const auto fused = ensemble(read_prediction_set(ens.a), read_prediction_set(ens.b), ens.cfg);
        write_f32(ens.out_occ, fused.occ);
        write_tensor(ens.out_sem, fused.sem);
        emit({{"command", "ensemble"}, {"weight_a", ens.cfg.weight_a}, {"weight_b", ens.cfg.weight_b},
              {"out_occ", ens.out_occ}, {"out_sem", ens.out_sem}});
      };
    });
  }

  // threshold
  struct {
    std::string occ, sem, table, out;
  } thr;
  {
    auto* cmd = app.add_subcommand("threshold", "Apply per-class occupancy thresholds");
    cmd->add_option("--occ", thr.occ, "Occupancy probabilities")->required();
    cmd->add_option("--sem", thr.sem, "Argmax labels (u8)")->required();
    cmd->add_option("--table", thr.table, "Threshold table JSON (default: built-in table)");
    cmd->add_option("--out", thr.out, "Final labels (u8)")->required();
    cmd->callback([&] {
      action = [&] {
        const ThresholdTable table = thr.table.empty() ? ThresholdTable::default_table() : load_threshold_table(thr.table);
        const LabelGrid labels = apply_thresholds(read_real_tensor(thr.occ), read_tensor_as<std::uint8_t>(thr.sem), table);
        write_tensor(thr.out, labels);
        Json values = Json::object();
        for (std::size_t c = 0; c < table.size() && c < kClassNames.size(); ++c) {
          values[std::string(kClassNames[c])] = table.values()[c];
        }
        emit({{"command", "threshold"}, {"out", thr.out}, {"thresholds", values}});
      };
    });
  }

  // eval
  struct {
    std::string pred, gt, mask, out;
    int num_classes = kNumClasses;
    bool include_free = false;
  } ev;
  {
    auto* cmd = app.add_subcommand("eval", "Score a label grid against ground truth");
    cmd->add_option("--pred", ev.pred)->required();
    cmd->add_option("--gt", ev.gt)->required();
    cmd->add_option("--mask", ev.mask)->required();
    cmd->add_option("--num-classes", ev.num_classes)->capture_default_str();
    cmd->add_flag("--include-free", ev.include_free, "Score FREE as an extra class");
    cmd->add_option("--out", ev.out, "Output JSON report")->required();
    cmd->callback([&] {
      action = [&] {
        ConfusionTally tally(ev.num_classes, ev.include_free);
        accumulate(read_tensor_as<std::uint8_t>(ev.pred), read_tensor_as<std::uint8_t>(ev.gt),
                   read_tensor_as<std::uint8_t>(ev.mask), tally);
        Json report = miou(tally);
        write_json_file(ev.out, report);
        emit({{"command", "eval"}, {"out", ev.out}, {"num_classes", ev.num_classes},
              {"include_free", ev.include_free}, {"report", report}});
      };
    });
  }

  // run
  struct {
    std::string input, output, config;
  } run;
  {
    auto* cmd = app.add_subcommand("run", "Run every stage on an input directory");
    cmd->add_option("--input", run.input, "Input directory (see README)")->required();
    cmd->add_option("--output", run.output, "Output directory")->required();
    cmd->add_option("--config", run.config, "Pipeline config (default: <input>/config.json)");
    cmd->callback([&] {
      action = [&] {
        const fs::path cfg_path = run.config.empty() ? fs::path(run.input) / "config.json" : fs::path(run.config);
        const auto cfg = json_as<PipelineConfig>(read_json_file(cfg_path), cfg_path.string());
        const PipelineSummary summary = run_pipeline(cfg, run.input, run.output);
        emit({{"command", "run"}, {"input", run.input}, {"output", run.output}, {"config", cfg_path.string()},
              {"loss_total", summary.loss.total}, {"miou", summary.eval.miou},
              {"voxels_evaluated", summary.eval.voxels_evaluated}});
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code_for(ErrorKind::kValidation);
  }

  try {
    if (threads > 0) set_threads(threads);
    action();
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error (validation): %s\n", e.what());
    return exit_code_for(ErrorKind::kValidation);
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error (io): %s\n", e.what());
    return exit_code_for(ErrorKind::kIo);
  }
  return 0;
}
