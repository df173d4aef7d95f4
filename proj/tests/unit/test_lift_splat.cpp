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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <tuple>

#include "instances.hpp"
#include "msocc/error.hpp"
#include "msocc/lift_splat.hpp"
#include "msocc/reference/naive_kernels.hpp"

using namespace msocc;
using msocc::testing::Rng;

namespace {

Camera forward_camera(int w, int h) {
  Camera cam;
  cam.intrinsics = Intrinsics{static_cast<double>(w), static_cast<double>(w), w / 2.0, h / 2.0, w, h};
  return cam;
}

}  // namespace

TEST_CASE("depth softmax") {
  const auto flat = normalize_depth_logits(Tensor<double>({4, 2, 3}));
  for (double p : flat.probs.values()) CHECK(p == doctest::Approx(0.25));

  Tensor<double> spike({5, 1, 1});
  spike[2] = 1000.0;
  const auto sharp = normalize_depth_logits(spike);
  CHECK(std::abs(sharp.probs[2] - 1.0) < 1e-12);

  Rng rng(21);
  const auto random = normalize_depth_logits(testing::random_tensor(rng, {7, 4, 5}, -20, 20));
  for (std::size_t px = 0; px < 20; ++px) {
    double sum = 0.0;
    for (std::size_t d = 0; d < 7; ++d) sum += random.probs[d * 20 + px];
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }

  Tensor<double> bad({2, 1, 1});
  bad[0] = std::nan("");
  CHECK_THROWS_AS(normalize_depth_logits(bad), Error);
  try {
    normalize_depth_logits(bad);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNumerical);
  }
}

TEST_CASE("pooling index edge cases") {
  CameraRig rig{{forward_camera(4, 2)}};
  const FrustumSpec f{4, 2, 1, 1.0, 5.0, 1.0};

  SUBCASE("camera looking away from the grid") {
    VoxelGridSpec g;
    g.nx = g.ny = g.nz = 4;
    g.origin = Vec3(-2, -2, -10);  // entirely behind the camera
    const PoolingIndex idx = build_pooling_index(rig, f, g);
    CHECK(idx.entries.empty());
    CHECK(idx.interval_count() == 0);
  }

  SUBCASE("single enclosing cell") {
    VoxelGridSpec g;
    g.origin = Vec3(-100, -100, -100);
    g.voxel_size = Vec3(200, 200, 200);
    const PoolingIndex idx = build_pooling_index(rig, f, g);
    CHECK(idx.interval_count() == 1);
    CHECK(idx.entries.size() == f.point_count());
    CHECK(idx.interval_starts == std::vector<std::size_t>{0, f.point_count()});
  }
}

TEST_CASE("pooling index matches brute-force enumeration") {
  Rng rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = testing::random_lift_instance(rng, 2, 8, 4, 6, 10);
    const PoolingIndex idx = build_pooling_index(inst.rig, inst.frustum, inst.grid);
    std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> got, expect;
    for (const auto& e : idx.entries) got.emplace_back(e.voxel, e.camera, e.point);
    for (std::uint32_t c = 0; c < inst.rig.size(); ++c) {
      const auto pts = frustum_points(inst.rig.cameras[c].intrinsics, inst.frustum, inst.rig.cameras[c].cam_to_ego);
      for (std::uint32_t p = 0; p < pts.size(); ++p) {
        if (auto v = voxel_index(pts[p], inst.grid)) expect.emplace_back(static_cast<std::uint32_t>(*v), c, p);
      }
    }
    std::sort(expect.begin(), expect.end());
    CHECK(got == expect);  // production order is already (voxel, camera, point)
    // every interval is one voxel, and consecutive intervals differ
    for (std::size_t i = 0; i < idx.interval_count(); ++i) {
      const auto begin = idx.interval_starts[i], end = idx.interval_starts[i + 1];
      REQUIRE(begin < end);
      for (auto j = begin; j < end; ++j) CHECK(idx.entries[j].voxel == idx.entries[begin].voxel);
      if (i > 0) CHECK(idx.entries[begin - 1].voxel < idx.entries[begin].voxel);
    }
  }
}

TEST_CASE("one-hot depth puts one pixel's features in one cell") {
  const int w = 4, h = 3, bins = 5;
  CameraRig rig{{forward_camera(w, h)}};
  const FrustumSpec f{w, h, 1, 1.0, 6.0, 1.0};
  VoxelGridSpec g;
  g.nx = g.ny = 8;
  g.nz = 8;
  g.origin = Vec3(-4, -4, 0);
  g.voxel_size = Vec3(1, 1, 1);

  Tensor<double> feat({2, static_cast<std::size_t>(h), static_cast<std::size_t>(w)});
  const std::size_t px = 1 * w + 2;
  feat[px] = 3.0;
  feat[static_cast<std::size_t>(w * h) + px] = -7.0;
  Tensor<double> logits({bins, static_cast<std::size_t>(h), static_cast<std::size_t>(w)});
  logits[3 * w * h + px] = 1000.0;

  const std::vector<FeatureMap> maps{{feat, 1}};
  const std::vector<DepthDistribution> depths{normalize_depth_logits(logits)};
  const auto grid = lift_and_pool(maps, depths, build_pooling_index(rig, f, g));
  const auto cell = voxel_index(unproject(2.5, 1.5, f.bin_center(3), rig.cameras[0].intrinsics), g);
  REQUIRE(cell.has_value());
  int nonzero = 0;
  for (std::size_t i = 0; i < g.cell_count(); ++i) nonzero += grid.values[i] != 0.0;
  CHECK(nonzero == 1);
  CHECK(grid.values[*cell] == doctest::Approx(3.0));
  CHECK(grid.values[g.cell_count() + *cell] == doctest::Approx(-7.0));
}

TEST_CASE("uniform depth splits a pixel's mass evenly along its ray") {
  const int bins = 6;
  CameraRig rig{{forward_camera(1, 1)}};
  const FrustumSpec f{1, 1, 1, 1.0, 7.0, 1.0};
  VoxelGridSpec g;
  g.nx = g.ny = 1;
  g.nz = bins;
  g.origin = Vec3(-0.5, -0.5, 1.0);
  g.voxel_size = Vec3(1, 1, 1);
  const std::vector<FeatureMap> maps{{Tensor<double>({1, 1, 1}, {6.0}), 1}};
  const std::vector<DepthDistribution> depths{normalize_depth_logits(Tensor<double>({bins, 1, 1}))};
  const auto grid = lift_and_pool(maps, depths, build_pooling_index(rig, f, g));
  for (int z = 0; z < bins; ++z) CHECK(grid.values[static_cast<std::size_t>(z)] == doctest::Approx(1.0));
}

TEST_CASE("lift and pool matches the naive scatter") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = testing::random_lift_instance(rng, 2, 8, 4, 6, 10);
    const auto pooled = lift_and_pool(inst.features, inst.depths, build_pooling_index(inst.rig, inst.frustum, inst.grid));
    const auto naive = reference::lift_scatter(inst.rig, inst.frustum, inst.grid, inst.features, inst.depths);
    REQUIRE(pooled.values.shape() == naive.shape());
    CHECK(testing::max_relative_error(pooled.values.values(), naive.values()) < 1e-12);
  }
}

TEST_CASE("lift and pool rejects mismatched inputs") {
  Rng rng(24);
  auto inst = testing::random_lift_instance(rng, 2, 8, 4, 6, 10);
  const PoolingIndex idx = build_pooling_index(inst.rig, inst.frustum, inst.grid);
  const std::vector<FeatureMap> one_camera{inst.features[0]};
  CHECK_THROWS_AS(lift_and_pool(one_camera, inst.depths, idx), Error);
  inst.features[1].values = Tensor<double>({inst.features[0].channels() + 1, 4, 8});
  CHECK_THROWS_AS(lift_and_pool(inst.features, inst.depths, idx), Error);
}
