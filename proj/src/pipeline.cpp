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

#include "msocc/pipeline.hpp"

#include <cstdio>
#include <string>
#include <utility>

#include "msocc/error.hpp"
#include "msocc/gt_multiscale.hpp"
#include "msocc/lift_splat.hpp"
#include "msocc/tensor_io.hpp"

namespace fs = std::filesystem;

namespace msocc {
namespace {

template <typename Fn>
auto run_stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("stage ") + name + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kValidation, std::string("stage ") + name + ": " + e.what());
  }
}

std::string stride_tag(int stride) { return "_s" + std::to_string(stride); }
std::string level_tag(std::size_t level) { return "_l" + std::to_string(level); }

// Splits a leading camera axis: N x ... -> N tensors.
std::vector<Tensor<double>> split_cameras(const Tensor<double>& t, std::size_t cameras, const fs::path& path) {
  if (t.rank() < 2 || t.dim(0) != cameras) {
    fail_validation(path.string() + ": expected a leading axis of " + std::to_string(cameras) +
                    " cameras, got shape " + shape_to_string(t.shape()));
  }
  const Shape inner(t.shape().begin() + 1, t.shape().end());
  std::vector<Tensor<double>> out;
  for (std::size_t c = 0; c < cameras; ++c) {
    const auto slab = t.slab(c);
    out.emplace_back(inner, std::vector<double>(slab.begin(), slab.end()));
  }
  return out;
}

Tensor<double> join_cameras(const std::vector<Tensor<double>>& parts) {
  Shape shape{parts.size()};
  shape.insert(shape.end(), parts.front().shape().begin(), parts.front().shape().end());
  std::vector<double> data;
  data.reserve(element_count(shape));
  for (const auto& p : parts) data.insert(data.end(), p.storage().begin(), p.storage().end());
  return Tensor<double>(std::move(shape), std::move(data));
}

std::vector<FeatureMap> read_features(const fs::path& path, std::size_t cameras, int stride) {
  std::vector<FeatureMap> maps;
  for (auto& t : split_cameras(read_real_tensor(path), cameras, path)) {
    require(t.rank() == 3, path.string() + ": features must be N x C x H x W");
    maps.push_back(FeatureMap{std::move(t), stride});
  }
  return maps;
}

Shape grid_shape(const VoxelGridSpec& g) {
  return {static_cast<std::size_t>(g.nx), static_cast<std::size_t>(g.ny), static_cast<std::size_t>(g.nz)};
}

const char* weight_mode_name(WeightMode m) {
  return m == WeightMode::kUniform ? "uniform" : "inverse_frequency";
}

const char* axis_name(int axis) { return axis == 0 ? "x" : axis == 1 ? "y" : "z"; }

int parse_axis(const std::string& s) {
  if (s == "x") return 0;
  if (s == "y") return 1;
  if (s == "z") return 2;
  fail_validation("unknown flip axis \"" + s + "\" (expected x, y or z)");
}

}  // namespace

PredictionSet read_prediction_set(const fs::path& dir) {
  const auto tags = json_as<std::vector<AugmentationTag>>(read_json_file(dir / "tags.json"),
                                                          (dir / "tags.json").string());
  PredictionSet set;
  for (std::size_t j = 0; j < tags.size(); ++j) {
    const std::string stem = "entry_" + std::to_string(j);
    set.entries.push_back(PredictionEntry{tags[j], read_real_tensor(dir / (stem + "_occ.msoc")),
                                          read_real_tensor(dir / (stem + "_sem.msoc"))});
  }
  return set;
}

void write_prediction_set(const fs::path& dir, const PredictionSet& set) {
  Json tags = Json::array();
  for (std::size_t j = 0; j < set.entries.size(); ++j) {
    const auto& e = set.entries[j];
    tags.push_back(e.tag);
    const std::string stem = "entry_" + std::to_string(j);
    write_f32(dir / (stem + "_occ.msoc"), e.occ);
    write_f32(dir / (stem + "_sem.msoc"), e.sem);
  }
  write_json_file(dir / "tags.json", tags);
}

std::string frame_name(int t) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d", t);
  return buf;
}

PipelineConfig PipelineConfig::defaults(int image_width, int image_height, const VoxelGridSpec& full_grid) {
  PipelineConfig c;
  auto frustum = [&](int stride) {
    return FrustumSpec{image_width / stride, image_height / stride, stride, 1.0, 60.0, 1.0};
  };
  c.cost_frustum = frustum(4);
  for (int level = 0; level < 3; ++level) {
    c.lift_frustums.push_back(frustum(8 << level));
    c.grids.push_back(full_grid.coarsened(1 << level));
  }
  return c;
}

void PipelineConfig::validate() const {
  require(num_classes >= 1 && num_classes < kFreeLabel, "num_classes out of range");
  require(past_frames >= 1, "past_frames must be >= 1");
  require(feature_channels >= 0, "feature_channels must be >= 0");
  cost_frustum.validate();
  require(!grids.empty(), "at least one scale is required");
  require(lift_frustums.size() == grids.size(), "one lift frustum per grid scale is required");
  require(loss.alpha.size() == grids.size(), "one loss weight per grid scale is required");
  require(loss.gamma >= 0.0, "focal gamma must be >= 0");
  for (const auto& f : lift_frustums) {
    f.validate();
    require(f.stride % cost_frustum.stride == 0, "lift strides must be multiples of the cost-volume stride");
  }
  for (const auto& g : grids) g.validate();
  require(ensemble.weight_a > 0.0 && ensemble.weight_b > 0.0, "ensemble weights must be positive");
  for (int axis : {tta_axes.horizontal, tta_axes.vertical}) {
    require(axis >= 0 && axis < 3, "flip axes must be 0, 1 or 2");
  }
}

void to_json(Json& j, const PipelineConfig& c) {
  j = Json{{"num_classes", c.num_classes},
           {"past_frames", c.past_frames},
           {"feature_channels", c.feature_channels},
           {"cost_frustum", c.cost_frustum},
           {"lift_frustums", c.lift_frustums},
           {"grids", c.grids},
           {"loss",
            {{"gamma", c.loss.gamma}, {"alpha", c.loss.alpha}, {"weight_mode", weight_mode_name(c.loss.weight_mode)}}},
           {"tta_axes", {{"horizontal", axis_name(c.tta_axes.horizontal)}, {"vertical", axis_name(c.tta_axes.vertical)}}},
           {"ensemble", {{"weight_a", c.ensemble.weight_a}, {"weight_b", c.ensemble.weight_b}}},
           {"threshold_table", c.threshold_table},
           {"warp_mode", c.warp_mode == WarpMode::kNearest ? "nearest" : "trilinear"},
           {"eval_include_free", c.eval_include_free}};
}

void from_json(const Json& j, PipelineConfig& c) {
  c.num_classes = j.value("num_classes", kNumClasses);
  c.past_frames = j.value("past_frames", 8);
  c.feature_channels = j.value("feature_channels", 0);
  j.at("cost_frustum").get_to(c.cost_frustum);
  j.at("lift_frustums").get_to(c.lift_frustums);
  j.at("grids").get_to(c.grids);
  c.loss = LossConfig{};
  c.loss.alpha = default_scale_weights(static_cast<int>(c.grids.size()));
  if (j.contains("loss")) {
    const Json& l = j.at("loss");
    c.loss.gamma = l.value("gamma", kDefaultFocalGamma);
    if (l.contains("alpha")) l.at("alpha").get_to(c.loss.alpha);
    const std::string mode = l.value("weight_mode", std::string("inverse_frequency"));
    if (mode == "inverse_frequency") {
      c.loss.weight_mode = WeightMode::kInverseFrequency;
    } else if (mode == "uniform") {
      c.loss.weight_mode = WeightMode::kUniform;
    } else {
      fail_validation("unknown weight_mode \"" + mode + "\"");
    }
  }
  if (j.contains("tta_axes")) {
    c.tta_axes.horizontal = parse_axis(j.at("tta_axes").value("horizontal", std::string("x")));
    c.tta_axes.vertical = parse_axis(j.at("tta_axes").value("vertical", std::string("y")));
  }
  if (j.contains("ensemble")) {
    c.ensemble.weight_a = j.at("ensemble").value("weight_a", 0.45);
    c.ensemble.weight_b = j.at("ensemble").value("weight_b", 0.55);
  }
  c.threshold_table = j.value("threshold_table", std::string());
  const std::string warp = j.value("warp_mode", std::string("trilinear"));
  require(warp == "trilinear" || warp == "nearest", "unknown warp_mode \"" + warp + "\"");
  c.warp_mode = warp == "nearest" ? WarpMode::kNearest : WarpMode::kTrilinear;
  c.eval_include_free = j.value("eval_include_free", false);
}

PipelineSummary run_pipeline(const PipelineConfig& config, const fs::path& in, const fs::path& out) {
  run_stage("config", [&] { config.validate(); return 0; });
  const int frames = config.past_frames + 1;
  const int current = frames - 1;

  const auto [rig, poses] = run_stage("load", [&] {
    auto r = load_rig(in / "rig.json");
    auto p = load_poses(in / "poses.json");
    require(p.size() == static_cast<std::size_t>(frames),
            (in / "poses.json").string() + ": expected " + std::to_string(frames) + " poses, got " +
                std::to_string(p.size()));
    return std::make_pair(std::move(r), std::move(p));
  });
  const std::size_t cameras = rig.size();
  fs::create_directories(out);

  // Cost volumes between adjacent frames; the oldest frame only serves as the
  // previous view of the first pair.
  run_stage("cost-volume", [&] {
    const FrustumSpec& f = config.cost_frustum;
    const CameraRig rig_cv = rig.scaled(f.stride);
    for (int t = 1; t < frames; ++t) {
      const fs::path cur_path = in / "frames" / frame_name(t) / ("feat" + stride_tag(f.stride) + ".msoc");
      const fs::path prev_path = in / "frames" / frame_name(t - 1) / ("feat" + stride_tag(f.stride) + ".msoc");
      const auto cur = read_features(cur_path, cameras, f.stride);
      const auto prev = read_features(prev_path, cameras, f.stride);
      const RigidTransform prev_to_cur = relative_ego_motion(poses[static_cast<std::size_t>(t - 1)],
                                                             poses[static_cast<std::size_t>(t)]);
      std::vector<CostVolume> volumes;
      for (std::size_t c = 0; c < cameras; ++c) {
        volumes.push_back(build_cost_volume(cur[c], prev[c], prev_to_cur, rig_cv.cameras[c], f));
      }
      const std::string pair = "pair_" + frame_name(t);
      auto write_volumes = [&](const std::vector<CostVolume>& vs, int stride) {
        std::vector<Tensor<double>> parts;
        for (const auto& v : vs) parts.push_back(v.values);
        write_f32(out / "cost_volumes" / (pair + stride_tag(stride) + ".msoc"), join_cameras(parts));
      };
      write_volumes(volumes, f.stride);
      for (const auto& lf : config.lift_frustums) {
        std::vector<CostVolume> rescaled;
        for (const auto& v : volumes) rescaled.push_back(rescale_cost_volume(v, lf.stride));
        write_volumes(rescaled, lf.stride);
      }
    }
    return 0;
  });

  // Lift frames 1..T-1 at every scale, align them to the current frame and
  // stack along channels.
  run_stage("lift", [&] {
    for (std::size_t level = 0; level < config.levels(); ++level) {
      const FrustumSpec& f = config.lift_frustums[level];
      const PoolingIndex index = build_pooling_index(rig.scaled(f.stride), f, config.grids[level]);
      std::vector<VoxelFeatureGrid> aligned;
      for (int t = 1; t < frames; ++t) {
        const fs::path dir = in / "frames" / frame_name(t);
        const auto features = read_features(dir / ("feat" + stride_tag(f.stride) + ".msoc"), cameras, f.stride);
        if (config.feature_channels > 0) {
          require(features.front().channels() == static_cast<std::size_t>(config.feature_channels),
                  "feature channel count differs from config");
        }
        const fs::path logits_path = dir / ("depth_logits" + stride_tag(f.stride) + ".msoc");
        std::vector<DepthDistribution> depths;
        for (const auto& logits : split_cameras(read_real_tensor(logits_path), cameras, logits_path)) {
          depths.push_back(normalize_depth_logits(logits));
        }
        VoxelFeatureGrid pooled = lift_and_pool(features, depths, index);
        write_f32(out / "voxel_features" / ("frame_" + frame_name(t) + level_tag(level) + ".msoc"), pooled.values);
        const RigidTransform to_current = relative_ego_motion(poses[static_cast<std::size_t>(t)],
                                                              poses[static_cast<std::size_t>(current)]);
        aligned.push_back(warp_voxel_grid(pooled, to_current, config.warp_mode));
      }
      const TemporalStack stack = stack_temporal(aligned);
      write_f32(out / ("temporal_stack" + level_tag(level) + ".msoc"), stack.values);
    }
    return 0;
  });

  const MultiScaleGT gt = run_stage("gt", [&] {
    const auto occ = read_tensor_as<std::uint8_t>(in / "gt" / "occ.msoc");
    const auto sem = read_tensor_as<std::uint8_t>(in / "gt" / "sem.msoc");
    const auto mask = read_tensor_as<std::uint8_t>(in / "gt" / "mask.msoc");
    require_shape(occ, grid_shape(config.grids[0]), "gt/occ.msoc");
    auto pyramid = build_pyramid(occ, sem, mask, static_cast<int>(config.levels()));
    for (std::size_t level = 0; level < pyramid.levels.size(); ++level) {
      require_shape(pyramid.levels[level].occ, grid_shape(config.grids[level]), "ground truth at level " + std::to_string(level));
      const fs::path dir = out / "gt_pyramid";
      write_tensor(dir / ("occ" + level_tag(level) + ".msoc"), pyramid.levels[level].occ);
      write_tensor(dir / ("sem" + level_tag(level) + ".msoc"), pyramid.levels[level].sem);
      write_tensor(dir / ("mask" + level_tag(level) + ".msoc"), pyramid.levels[level].mask);
    }
    return pyramid;
  });

  PipelineSummary summary;
  summary.loss = run_stage("loss", [&] {
    std::vector<ScaleLoss> scales;
    Json weights_json = Json::array();
    for (std::size_t level = 0; level < config.levels(); ++level) {
      const GtLevel& g = gt.levels[level];
      const auto occ_logits = read_real_tensor(in / "heads" / ("occ_logits" + level_tag(level) + ".msoc"));
      const auto sem_logits = read_real_tensor(in / "heads" / ("sem_logits" + level_tag(level) + ".msoc"));
      const ClassWeights weights = config.loss.weight_mode == WeightMode::kUniform
                                       ? ClassWeights::uniform(config.num_classes)
                                       : class_frequency_weights(g.sem, g.occ, g.mask, config.num_classes);
      weights_json.push_back(weights);
      ScaleLoss s;
      s.occ = bce_occ_loss(occ_logits, g.occ, g.mask, weights).value;
      s.sem = focal_sem_loss(sem_logits, g.sem, g.occ, g.mask, weights, config.loss.gamma).value;

      const FrustumSpec& f = config.lift_frustums[level];
      const fs::path logits_path = in / "frames" / frame_name(current) / ("depth_logits" + stride_tag(f.stride) + ".msoc");
      const auto depth = read_real_tensor(in / "gt" / ("depth" + stride_tag(f.stride) + ".msoc"));
      const auto valid = read_tensor_as<std::uint8_t>(in / "gt" / ("depth_valid" + stride_tag(f.stride) + ".msoc"));
      s.depth = depth_loss(read_real_tensor(logits_path), depth, valid, f).value;
      scales.push_back(s);
    }
    LossReport report = total_loss(scales, config.loss.alpha);
    Json j = report;
    j["class_weights"] = weights_json;
    j["gamma"] = config.loss.gamma;
    j["weight_mode"] = weight_mode_name(config.loss.weight_mode);
    write_json_file(out / "loss_report.json", j);
    return report;
  });

  const LabelGrid final_labels = run_stage("postprocess", [&] {
    PredictionSet sets[2];
    const char* names[2] = {"model_a", "model_b"};
    for (int m = 0; m < 2; ++m) {
      for (auto& e : read_prediction_set(in / "predictions" / names[m]).entries) {
        sets[m].entries.push_back(deaugment(e, config.tta_axes));
      }
    }
    const EnsembleResult fused = ensemble(sets[0], sets[1], config.ensemble);
    const ThresholdTable table = config.threshold_table.empty()
                                     ? ThresholdTable::default_table()
                                     : load_threshold_table(config.threshold_table);
    LabelGrid labels = apply_thresholds(fused.occ, fused.sem, table);
    write_f32(out / "ensemble_occ.msoc", fused.occ);
    write_tensor(out / "ensemble_sem.msoc", fused.sem);
    write_tensor(out / "final_labels.msoc", labels);
    return labels;
  });

  summary.eval = run_stage("eval", [&] {
    ConfusionTally tally(config.num_classes, config.eval_include_free);
    accumulate(final_labels, gt.levels[0].sem, gt.levels[0].mask, tally);
    MiouReport report = miou(tally);
    write_json_file(out / "eval_report.json", report);
    return report;
  });

  Json meta{{"config", config}, {"frames", frames}, {"cameras", cameras},
            {"lifted_frames", config.past_frames}, {"loss_total", summary.loss.total},
            {"miou", summary.eval.miou}};
  write_json_file(out / "run_meta.json", meta);
  return summary;
}

VoxelGridSpec SynthOptions::small_grid() {
  VoxelGridSpec g;
  g.nx = 64;
  g.ny = 64;
  g.nz = 8;
  g.origin = Vec3(-25.6, -25.6, -1.0);
  g.voxel_size = Vec3(0.8, 0.8, 0.8);
  return g;
}

PipelineConfig write_synthetic_inputs(const SynthOptions& o, const fs::path& dir) {
  require(o.image_width % 32 == 0 && o.image_height % 32 == 0, "synthetic image size must be a multiple of 32");
  require(o.channels >= 1, "channel count must be >= 1");
  PipelineConfig config = PipelineConfig::defaults(o.image_width, o.image_height, o.grid);
  config.feature_channels = o.channels;
  config.validate();

  SceneConfig sc;
  sc.grid = o.grid;
  sc.rig = make_surround_rig(o.cameras, o.image_width, o.image_height);
  sc.depth_frustum = config.lift_frustums[0];
  sc.frames = config.past_frames + 1;
  sc.boxes = o.boxes;
  sc.seed = o.seed;
  if (o.static_ego) {
    sc.speed = 0.0;
    sc.yaw_rate = 0.0;
  }
  const SyntheticScene scene = make_scene(sc);

  fs::create_directories(dir);
  write_json_file(dir / "config.json", config);
  write_json_file(dir / "rig.json", scene.rig);
  write_json_file(dir / "poses.json", Json{{"ego_to_global", scene.poses}});
  Json boxes = Json::array();
  for (const auto& b : scene.boxes) boxes.push_back({{"lo", b.lo}, {"hi", b.hi}, {"label", b.label}});
  write_json_file(dir / "scene.json", Json{{"seed", o.seed},
                                           {"cameras", o.cameras},
                                           {"image_width", o.image_width},
                                           {"image_height", o.image_height},
                                           {"channels", o.channels},
                                           {"boxes", boxes},
                                           {"corrupt_fraction", o.corrupt_fraction},
                                           {"static_ego", o.static_ego},
                                           {"grid", o.grid}});

  // Frame 00 is only the previous view of the first cost-volume pair, so it
  // gets cost-stride features and nothing else.
  for (int t = 0; t < sc.frames; ++t) {
    const fs::path fdir = dir / "frames" / frame_name(t);
    const FrustumSpec& cf = config.cost_frustum;
    write_f32(fdir / ("feat" + stride_tag(cf.stride) + ".msoc"), render_features(scene, t, cf, o.channels));
    if (t == 0) continue;
    for (const auto& f : config.lift_frustums) {
      write_f32(fdir / ("feat" + stride_tag(f.stride) + ".msoc"), render_features(scene, t, f, o.channels));
      write_f32(fdir / ("depth_logits" + stride_tag(f.stride) + ".msoc"), render_depth_logits(scene, t, f));
    }
  }

  write_tensor(dir / "gt" / "occ.msoc", scene.gt_occ);
  write_tensor(dir / "gt" / "sem.msoc", scene.gt_sem);
  write_tensor(dir / "gt" / "mask.msoc", scene.mask);
  for (const auto& f : config.lift_frustums) {
    const auto depth = render_depth(scene.gt_occ, scene.grid, scene.rig.scaled(f.stride), RigidTransform::identity(), f);
    write_tensor(dir / "gt" / ("depth" + stride_tag(f.stride) + ".msoc"), depth.depth);
    write_tensor(dir / "gt" / ("depth_valid" + stride_tag(f.stride) + ".msoc"), depth.valid);
  }

  const MultiScaleGT pyramid = build_pyramid(scene.gt_occ, scene.gt_sem, scene.mask, static_cast<int>(config.levels()));
  for (std::size_t level = 0; level < pyramid.levels.size(); ++level) {
    const auto [occ_logits, sem_logits] = make_head_logits(pyramid.levels[level].occ, pyramid.levels[level].sem,
                                                           config.num_classes, mix_hash(o.seed, level));
    write_f32(dir / "heads" / ("occ_logits" + level_tag(level) + ".msoc"), occ_logits);
    write_f32(dir / "heads" / ("sem_logits" + level_tag(level) + ".msoc"), sem_logits);
  }

  const auto [a, b] = make_oracle_predictions(scene, config.num_classes, o.corrupt_fraction, config.tta_axes);
  write_prediction_set(dir / "predictions" / "model_a", a);
  write_prediction_set(dir / "predictions" / "model_b", b);
  return config;
}

}  // namespace msocc
