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

#include <cmath>

#include "instances.hpp"
#include "msocc/error.hpp"
#include "msocc/fixtures.hpp"
#include "msocc/reference/naive_kernels.hpp"
#include "msocc/temporal.hpp"

using namespace msocc;
using msocc::testing::Rng;

namespace {

Camera plain_camera(int w, int h) {
  return Camera{Intrinsics{static_cast<double>(w), static_cast<double>(w), w / 2.0, h / 2.0, w, h},
                RigidTransform::identity()};
}

VoxelFeatureGrid random_grid(Rng& rng, std::size_t channels, int nx, int ny, int nz) {
  VoxelGridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.origin = Vec3(-nx * 0.25, -ny * 0.25, -1.0);
  g.voxel_size = Vec3(0.5, 0.5, 0.5);
  return VoxelFeatureGrid{
      testing::random_tensor(rng, {channels, static_cast<std::size_t>(nx), static_cast<std::size_t>(ny),
                                   static_cast<std::size_t>(nz)}),
      g};
}

}  // namespace

TEST_CASE("bilinear sampling") {
  FeatureMap m{Tensor<double>({1, 2, 2}, {1.0, 2.0, 3.0, 4.0}), 1};
  double out = 0.0;
  CHECK(bilinear_sample(m, 0.5, 0.5, {&out, 1}));
  CHECK(out == doctest::Approx(1.0));
  CHECK(bilinear_sample(m, 1.0, 1.0, {&out, 1}));
  CHECK(out == doctest::Approx(2.5));
  CHECK(bilinear_sample(m, 0.0, 0.0, {&out, 1}));  // border clamps
  CHECK(out == doctest::Approx(1.0));
  CHECK_FALSE(bilinear_sample(m, 2.0, 1.0, {&out, 1}));
  CHECK_FALSE(bilinear_sample(m, -0.01, 1.0, {&out, 1}));
}

TEST_CASE("zero parallax gives the squared feature norm at every depth") {
  Rng rng(31);
  const Camera cam = plain_camera(12, 8);
  const FrustumSpec f{12, 8, 1, 1.0, 9.0, 1.0};
  const FeatureMap cur{testing::random_tensor(rng, {3, 8, 12}), 1};
  const CostVolume cv = build_cost_volume(cur, cur, RigidTransform::identity(), cam, f);
  for (int d = 0; d < f.depth_bins(); ++d)
    for (std::size_t px = 0; px < f.pixel_count(); ++px) {
      double norm = 0.0;
      for (std::size_t c = 0; c < 3; ++c) norm += cur.values[c * 96 + px] * cur.values[c * 96 + px];
      CHECK(cv.values[static_cast<std::size_t>(d) * 96 + px] == doctest::Approx(norm / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("hypotheses outside the previous view cost zero") {
  const Camera cam = plain_camera(8, 4);
  const FrustumSpec f{8, 4, 1, 1.0, 3.0, 1.0};
  FeatureMap ones{Tensor<double>({1, 4, 8}), 1};
  ones.values.fill(1.0);
  // a 100 m sideways jump pushes every near hypothesis out of the image
  const auto cv = build_cost_volume(ones, ones, RigidTransform::translation_only(Vec3(100, 0, 0)), cam, f);
  for (double v : cv.values.values()) CHECK(v == 0.0);
  // moving backwards past the points puts them behind the previous camera
  const auto behind = build_cost_volume(ones, ones, RigidTransform::translation_only(Vec3(0, 0, 50)), cam, f);
  for (double v : behind.values.values()) CHECK(v == 0.0);
}

TEST_CASE("cost volume matches the loop reference") {
  Rng rng(32);
  for (int trial = 0; trial < 5; ++trial) {
    const Camera cam = testing::random_outward_camera(rng, 10, 6);
    const FrustumSpec f{10, 6, 1, 1.0, 9.0, 1.0};
    const FeatureMap cur{testing::random_tensor(rng, {2, 6, 10}), 1};
    const FeatureMap prev{testing::random_tensor(rng, {2, 6, 10}), 1};
    const RigidTransform motion = testing::random_transform(rng, 0.1, 0.8);
    const auto cv = build_cost_volume(cur, prev, motion, cam, f);
    const auto ref = reference::cost_volume(cur, prev, motion, cam, f);
    CHECK(testing::max_relative_error(cv.values.values(), ref.values()) < 1e-12);
  }
}

TEST_CASE("textured plane depth recovery") {
  const Intrinsics k{40.0, 40.0, 24.0, 12.0, 48, 24};
  const FrustumSpec f{48, 24, 1, 1.0, 20.0, 1.0};
  const double depth = f.bin_center(7);
  const auto pair = textured_plane_features(depth, k, 32, 5, 6);
  const auto cv = build_cost_volume(pair.cur, pair.prev, pair.prev_to_cur, pair.camera, f);
  int hits = 0, total = 0;
  for (int v = 0; v < 24; ++v)
    for (int u = 0; u + pair.disparity < 48; ++u) {
      int best = 0;
      for (int d = 1; d < f.depth_bins(); ++d) {
        if (cv.values[static_cast<std::size_t>((d * 24 + v) * 48 + u)] >
            cv.values[static_cast<std::size_t>((best * 24 + v) * 48 + u)])
          best = d;
      }
      hits += best == 7;
      ++total;
    }
  CHECK(static_cast<double>(hits) / total >= 0.95);
}

TEST_CASE("cost volume rescaling") {
  SUBCASE("constant volume") {
    CostVolume cv{Tensor<double>({3, 8, 16}), 4};
    cv.values.fill(0.75);
    for (int s : {8, 16, 32}) {
      const auto r = rescale_cost_volume(cv, s);
      CHECK(r.stride == s);
      CHECK(r.values.dim(1) == 8u * 4 / s);
      for (double v : r.values.values()) CHECK(v == 0.75);
    }
  }
  SUBCASE("block mean") {
    CostVolume cv{Tensor<double>({1, 2, 2}, {1, 2, 3, 4}), 4};
    CHECK(rescale_cost_volume(cv, 8).values[0] == doctest::Approx(2.5));
  }
  SUBCASE("pooling by four equals pooling by two twice") {
    Rng rng(33);
    CostVolume cv{testing::random_tensor(rng, {5, 16, 24}), 4};
    const auto once = rescale_cost_volume(cv, 16);
    const auto twice = rescale_cost_volume(rescale_cost_volume(cv, 8), 16);
    for (std::size_t i = 0; i < once.values.size(); ++i) CHECK(std::abs(once.values[i] - twice.values[i]) < 1e-12);
  }
  SUBCASE("invalid targets") {
    CostVolume cv{Tensor<double>({1, 6, 6}), 4};
    CHECK_THROWS_AS(rescale_cost_volume(cv, 6), Error);
    CHECK_THROWS_AS(rescale_cost_volume(cv, 32), Error);  // 6 is not divisible by 8
  }
}

TEST_CASE("warp") {
  Rng rng(34);
  SUBCASE("identity is a bit-identical copy in both modes") {
    const auto grid = random_grid(rng, 3, 6, 5, 4);
    CHECK(warp_voxel_grid(grid, RigidTransform::identity(), WarpMode::kNearest).values == grid.values);
    CHECK(warp_voxel_grid(grid, RigidTransform::identity(), WarpMode::kTrilinear).values == grid.values);
  }
  SUBCASE("one-cell translation shifts indices") {
    const auto grid = random_grid(rng, 2, 6, 5, 4);
    const auto motion = RigidTransform::translation_only(Vec3(grid.spec.voxel_size.x(), 0, 0));
    for (WarpMode mode : {WarpMode::kNearest, WarpMode::kTrilinear}) {
      const auto out = warp_voxel_grid(grid, motion, mode);
      const std::size_t cells = grid.spec.cell_count();
      for (std::size_t c = 0; c < 2; ++c)
        for (int x = 0; x < 6; ++x)
          for (int y = 0; y < 5; ++y)
            for (int z = 0; z < 4; ++z) {
              const double got = out.values[c * cells + grid.spec.flat(x, y, z)];
              const double expect = x == 0 ? 0.0 : grid.values[c * cells + grid.spec.flat(x - 1, y, z)];
              CHECK(got == expect);
            }
    }
  }
  SUBCASE("trilinear matches the eight-neighbour oracle") {
    for (int trial = 0; trial < 10; ++trial) {
      const auto grid = random_grid(rng, 2, 7, 6, 5);
      const auto motion = testing::random_transform(rng, 0.2, 1.0);
      const auto out = warp_voxel_grid(grid, motion, WarpMode::kTrilinear);
      const auto ref = reference::trilinear_warp(grid.values, grid.spec, motion);
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(out.values[i] - ref[i]) < 1e-12);
    }
  }
}

TEST_CASE("temporal stacking") {
  Rng rng(35);
  std::vector<VoxelFeatureGrid> grids;
  for (int k = 0; k < 8; ++k) grids.push_back(random_grid(rng, 4, 3, 3, 2));

  const std::vector<VoxelFeatureGrid> single{grids[0]};
  CHECK(stack_temporal(single).values == grids[0].values);

  const std::vector<VoxelFeatureGrid> two{grids[0], grids[1]};
  const auto ab = stack_temporal(two);
  const std::size_t block = grids[0].values.size();
  for (std::size_t i = 0; i < block; ++i) {
    CHECK(ab.values[i] == grids[0].values[i]);
    CHECK(ab.values[block + i] == grids[1].values[i]);
  }

  const auto all = stack_temporal(grids);
  CHECK(all.values.dim(0) == 32);
  CHECK(all.frames == 8);
  for (std::size_t k = 0; k < 8; ++k) CHECK(all.frame(k).values == grids[k].values);

  auto mismatched = grids;
  mismatched[3].spec.nx = 4;
  CHECK_THROWS_AS(stack_temporal(mismatched), Error);
}
