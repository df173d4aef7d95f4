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

#include "msocc/json_io.hpp"

#include <Eigen/SVD>

#include <fstream>
#include <sstream>

namespace msocc {

void to_json(Json& j, const Intrinsics& k) {
  j = Json{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy},
           {"width", k.width}, {"height", k.height}};
}

void from_json(const Json& j, Intrinsics& k) {
  j.at("fx").get_to(k.fx);
  j.at("fy").get_to(k.fy);
  j.at("cx").get_to(k.cx);
  j.at("cy").get_to(k.cy);
  j.at("width").get_to(k.width);
  j.at("height").get_to(k.height);
}

void to_json(Json& j, const RigidTransform& t) {
  std::vector<double> r(9);
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) r[static_cast<std::size_t>(row * 3 + col)] = t.rotation(row, col);
  j = Json{{"rotation", r}, {"translation", {t.translation.x(), t.translation.y(), t.translation.z()}}};
}

void from_json(const Json& j, RigidTransform& t) {
  const auto r = j.at("rotation").get<std::vector<double>>();
  const auto p = j.at("translation").get<std::vector<double>>();
  require(r.size() == 9, "rotation must have 9 row-major entries");
  require(p.size() == 3, "translation must have 3 entries");
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) t.rotation(row, col) = r[static_cast<std::size_t>(row * 3 + col)];
  t.translation = Vec3(p[0], p[1], p[2]);
  require(t.rotation.allFinite() && t.translation.allFinite(), "transform has non-finite entries");
  require(t.is_rigid(1e-6), "rotation is not orthonormal with determinant +1");
  if (!t.is_rigid()) {
    // Rotations printed with a handful of decimals: snap to the nearest rotation.
    const Eigen::JacobiSVD<Mat3> svd(t.rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
    t.rotation = svd.matrixU() * svd.matrixV().transpose();
  }
}

void to_json(Json& j, const Camera& c) {
  j = Json{{"intrinsics", c.intrinsics}, {"cam_to_ego", c.cam_to_ego}};
}

void from_json(const Json& j, Camera& c) {
  j.at("intrinsics").get_to(c.intrinsics);
  j.at("cam_to_ego").get_to(c.cam_to_ego);
}

void to_json(Json& j, const CameraRig& rig) { j = Json{{"cameras", rig.cameras}}; }

void from_json(const Json& j, CameraRig& rig) { j.at("cameras").get_to(rig.cameras); }

void to_json(Json& j, const FrustumSpec& f) {
  j = Json{{"feat_width", f.feat_width}, {"feat_height", f.feat_height}, {"stride", f.stride},
           {"depth_min", f.depth_min},   {"depth_max", f.depth_max},     {"depth_step", f.depth_step},
           {"D", f.depth_bins()}};
}

void from_json(const Json& j, FrustumSpec& f) {
  j.at("feat_width").get_to(f.feat_width);
  j.at("feat_height").get_to(f.feat_height);
  j.at("stride").get_to(f.stride);
  j.at("depth_min").get_to(f.depth_min);
  j.at("depth_max").get_to(f.depth_max);
  j.at("depth_step").get_to(f.depth_step);
}

void to_json(Json& j, const VoxelGridSpec& g) {
  j = Json{{"nx", g.nx},
           {"ny", g.ny},
           {"nz", g.nz},
           {"origin", {g.origin.x(), g.origin.y(), g.origin.z()}},
           {"voxel_size", {g.voxel_size.x(), g.voxel_size.y(), g.voxel_size.z()}}};
}

void from_json(const Json& j, VoxelGridSpec& g) {
  j.at("nx").get_to(g.nx);
  j.at("ny").get_to(g.ny);
  j.at("nz").get_to(g.nz);
  const auto o = j.at("origin").get<std::vector<double>>();
  const auto s = j.at("voxel_size").get<std::vector<double>>();
  require(o.size() == 3 && s.size() == 3, "origin and voxel_size must have 3 entries");
  g.origin = Vec3(o[0], o[1], o[2]);
  g.voxel_size = Vec3(s[0], s[1], s[2]);
}

void to_json(Json& j, const AugmentationTag& t) {
  j = Json{{"img_hflip", t.img_hflip}, {"vox_flip_x", t.vox_flip_x}, {"vox_flip_y", t.vox_flip_y}};
}

void from_json(const Json& j, AugmentationTag& t) {
  j.at("img_hflip").get_to(t.img_hflip);
  j.at("vox_flip_x").get_to(t.vox_flip_x);
  j.at("vox_flip_y").get_to(t.vox_flip_y);
}

void to_json(Json& j, const ClassWeights& w) { j = Json{{"occ", w.occ}, {"sem", w.sem}}; }

void to_json(Json& j, const LossReport& r) {
  Json scales = Json::array();
  for (std::size_t i = 0; i < r.scales.size(); ++i) {
    scales.push_back({{"scale", i},
                      {"alpha", r.alpha[i]},
                      {"L_occ", r.scales[i].occ},
                      {"L_sem", r.scales[i].sem},
                      {"L_depth", r.scales[i].depth},
                      {"L_i", r.scale_totals[i]}});
  }
  j = Json{{"scales", scales}, {"alpha", r.alpha}, {"total", r.total}};
}

void to_json(Json& j, const MiouReport& r) {
  Json per_class = Json::array();
  for (const auto& iou : r.per_class_iou) per_class.push_back(iou ? Json(*iou) : Json(nullptr));
  j = Json{{"per_class_iou", per_class}, {"miou", r.miou}, {"voxels_evaluated", r.voxels_evaluated}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    fail_validation(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

CameraRig load_rig(const std::filesystem::path& path) {
  auto rig = json_as<CameraRig>(read_json_file(path), path.string());
  rig.validate();
  return rig;
}

VoxelGridSpec load_grid(const std::filesystem::path& path) {
  auto g = json_as<VoxelGridSpec>(read_json_file(path), path.string());
  g.validate();
  return g;
}

std::vector<RigidTransform> load_poses(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  std::vector<RigidTransform> poses;
  if (j.is_object() && j.contains("ego_to_global")) {
    poses = json_as<std::vector<RigidTransform>>(j.at("ego_to_global"), path.string());
  } else if (j.is_array()) {
    poses = json_as<std::vector<RigidTransform>>(j, path.string());
  } else {
    poses.push_back(json_as<RigidTransform>(j, path.string()));
  }
  for (const auto& p : poses) p.validate();
  return poses;
}

}  // namespace msocc
