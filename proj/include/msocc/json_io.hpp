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

// JSON forms of the configuration and report types. Field names follow the
// struct members; rotations are 9 row-major numbers.

#include <filesystem>
#include <json.hpp>
#include <vector>

#include "msocc/eval.hpp"
#include "msocc/geometry.hpp"
#include "msocc/losses.hpp"
#include "msocc/postprocess.hpp"

namespace msocc {

using Json = nlohmann::json;

void to_json(Json& j, const Intrinsics& k);
void from_json(const Json& j, Intrinsics& k);
void to_json(Json& j, const RigidTransform& t);
void from_json(const Json& j, RigidTransform& t);
void to_json(Json& j, const Camera& c);
void from_json(const Json& j, Camera& c);
void to_json(Json& j, const CameraRig& rig);
void from_json(const Json& j, CameraRig& rig);
void to_json(Json& j, const FrustumSpec& f);
void from_json(const Json& j, FrustumSpec& f);
void to_json(Json& j, const VoxelGridSpec& g);
void from_json(const Json& j, VoxelGridSpec& g);
void to_json(Json& j, const AugmentationTag& t);
void from_json(const Json& j, AugmentationTag& t);
void to_json(Json& j, const ClassWeights& w);
void to_json(Json& j, const LossReport& r);
void to_json(Json& j, const MiouReport& r);

/// Reads and parses a JSON file; IO failures raise kIo, syntax errors kValidation.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

/// Converts a parsed document to T, turning schema errors into validation errors.
template <typename T>
T json_as(const Json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail_validation(what + ": " + e.what());
  }
}

CameraRig load_rig(const std::filesystem::path& path);
VoxelGridSpec load_grid(const std::filesystem::path& path);
/// Accepts a single transform object or {"ego_to_global": [...]} / a list.
std::vector<RigidTransform> load_poses(const std::filesystem::path& path);

}  // namespace msocc
