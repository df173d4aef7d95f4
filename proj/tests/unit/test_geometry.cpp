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
#include <numbers>

#include "instances.hpp"
#include "msocc/error.hpp"
#include "msocc/geometry.hpp"

using namespace msocc;
using msocc::testing::Rng;

namespace {

bool near(const Vec3& a, const Vec3& b, double tol) { return (a - b).cwiseAbs().maxCoeff() <= tol; }

bool near(const RigidTransform& a, const RigidTransform& b, double tol) {
  return (a.rotation - b.rotation).cwiseAbs().maxCoeff() <= tol &&
         (a.translation - b.translation).cwiseAbs().maxCoeff() <= tol;
}

Intrinsics sample_intrinsics() { return Intrinsics{500.0, 480.0, 320.0, 240.0, 640, 480}; }

}  // namespace

TEST_CASE("unproject principal ray and unit tangent") {
  const Intrinsics k = sample_intrinsics();
  CHECK(near(unproject(k.cx, k.cy, 5.0, k), Vec3(0, 0, 5), 1e-12));
  CHECK(near(unproject(k.cx + k.fx, k.cy, 2.0, k), Vec3(2, 0, 2), 1e-12));
}

TEST_CASE("project inverts unproject") {
  Rng rng(11);
  const Intrinsics k = sample_intrinsics();
  for (int i = 0; i < 200; ++i) {
    const double u = rng.uniform(-50, 700), v = rng.uniform(-50, 500), d = rng.uniform(0.1, 80);
    const auto [pu, pv] = project(unproject(u, v, d, k), k);
    CHECK(std::abs(pu - u) < 1e-9);
    CHECK(std::abs(pv - v) < 1e-9);
  }
}

TEST_CASE("compose identities and pointwise agreement") {
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    const RigidTransform a = testing::random_transform(rng);
    const RigidTransform b = testing::random_transform(rng);
    CHECK(near(compose(a, RigidTransform::identity()), a, 0.0));
    CHECK(near(compose(a, invert(a)), RigidTransform::identity(), 1e-9));
    const Vec3 p(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10));
    CHECK(near(compose(a, b).apply(p), a.apply(b.apply(p)), 1e-9));
    CHECK(a.is_rigid());
  }
}

TEST_CASE("relative ego motion") {
  Rng rng(13);
  const RigidTransform pose = testing::random_transform(rng);
  CHECK(near(relative_ego_motion(pose, pose), RigidTransform::identity(), 1e-9));

  SUBCASE("forward translation moves static points backwards") {
    const RigidTransform prev = RigidTransform::identity();
    const RigidTransform cur = RigidTransform::translation_only(Vec3(1, 0, 0));
    const RigidTransform rel = relative_ego_motion(prev, cur);
    // a world point at the previous ego origin is 1 m behind the moved vehicle
    CHECK(near(rel.apply(Vec3::Zero()), Vec3(-1, 0, 0), 1e-12));
  }

  SUBCASE("pointwise oracle through the world frame") {
    for (int i = 0; i < 50; ++i) {
      const RigidTransform prev = testing::random_transform(rng);
      const RigidTransform cur = testing::random_transform(rng);
      const Vec3 world(rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-3, 3));
      const Vec3 in_prev = invert(prev).apply(world);
      const Vec3 in_cur = invert(cur).apply(world);
      CHECK(near(relative_ego_motion(prev, cur).apply(in_prev), in_cur, 1e-9));
    }
  }

  SUBCASE("quarter turn") {
    const RigidTransform prev = RigidTransform::from_yaw(0.3, Vec3(4, -2, 0));
    const RigidTransform cur = RigidTransform::from_yaw(0.3 + std::numbers::pi / 2, Vec3(4, -2, 0));
    const RigidTransform rel = relative_ego_motion(prev, cur);
    CHECK(near(rel, RigidTransform::from_yaw(-std::numbers::pi / 2), 1e-9));
  }
}

TEST_CASE("rigid transform validation") {
  RigidTransform t;
  t.rotation(0, 0) = 2.0;
  CHECK_FALSE(t.is_rigid());
  CHECK_THROWS_AS(t.validate(), Error);
  RigidTransform reflect;
  reflect.rotation(2, 2) = -1.0;
  CHECK_FALSE(reflect.is_rigid());
}

TEST_CASE("frustum points") {
  const Intrinsics k{1.0, 1.0, 0.5, 0.5, 1, 1};
  const FrustumSpec one{1, 1, 1, 9.5, 10.5, 1.0};
  REQUIRE(one.depth_bins() == 1);
  const auto pts = frustum_points(k, one, RigidTransform::identity());
  REQUIRE(pts.size() == 1);
  CHECK(near(pts[0], Vec3(0, 0, 10), 1e-12));

  const FrustumSpec wide{44, 16, 16, 1.0, 60.0, 1.0};
  CHECK(wide.depth_bins() == 59);
  CHECK(wide.point_count() == 41536);
  const Intrinsics k16 = Intrinsics{700, 700, 352, 128, 704, 256}.scaled(16);
  CHECK(frustum_points(k16, wide, RigidTransform::identity()).size() == 41536);
}

TEST_CASE("frustum order is depth, row, column") {
  const Intrinsics k{2.0, 2.0, 1.5, 1.0, 3, 2};
  const FrustumSpec f{3, 2, 1, 1.0, 3.0, 1.0};
  const RigidTransform t = RigidTransform::from_yaw(0.4, Vec3(1, 2, 3));
  const auto pts = frustum_points(k, f, t);
  for (int d = 0; d < 2; ++d)
    for (int v = 0; v < 2; ++v)
      for (int u = 0; u < 3; ++u) {
        const Vec3 expect = t.apply(unproject(u + 0.5, v + 0.5, f.bin_center(d), k));
        CHECK(near(pts[static_cast<std::size_t>((d * 2 + v) * 3 + u)], expect, 1e-12));
      }
}

TEST_CASE("depth bins") {
  const FrustumSpec f{1, 1, 1, 1.0, 60.0, 1.0};
  CHECK(f.bin_center(0) == doctest::Approx(1.5));
  CHECK(f.bin_of(1.0) == 0);
  CHECK(f.bin_of(59.999) == 58);
  CHECK_FALSE(f.bin_of(60.0).has_value());
  CHECK_FALSE(f.bin_of(0.5).has_value());
  CHECK_FALSE(f.bin_of(std::nan("")).has_value());
  const FrustumSpec bad{1, 1, 1, 5.0, 2.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("voxel index") {
  const VoxelGridSpec g = VoxelGridSpec::full_default();
  CHECK(voxel_index(g.origin, g) == std::optional<std::size_t>(0));
  const Vec3 far = g.origin + Vec3(g.nx * g.voxel_size.x(), 0, 0);
  CHECK_FALSE(voxel_index(far, g).has_value());
  CHECK_FALSE(voxel_index(g.origin - Vec3(1e-9, 0, 0), g).has_value());

  Rng rng(14);
  for (int i = 0; i < 500; ++i) {
    const Vec3 p(rng.uniform(-40, 40), rng.uniform(-40, 40), rng.uniform(-1, 5.4));
    const int ix = static_cast<int>(std::floor((p.x() + 40) / 0.4));
    const int iy = static_cast<int>(std::floor((p.y() + 40) / 0.4));
    const int iz = static_cast<int>(std::floor((p.z() + 1) / 0.4));
    const auto idx = voxel_index(p, g);
    REQUIRE(idx.has_value());
    CHECK(*idx == g.flat(ix, iy, iz));
    CHECK(g.unflatten(*idx) == std::array<int, 3>{ix, iy, iz});
  }
}

TEST_CASE("grid coarsening keeps the extent") {
  const VoxelGridSpec g = VoxelGridSpec::full_default();
  const VoxelGridSpec c = g.coarsened(4);
  CHECK(c.nx == 50);
  CHECK(c.nz == 4);
  CHECK(c.voxel_size.x() == doctest::Approx(1.6));
  CHECK(c.origin == g.origin);
  CHECK_THROWS_AS(g.coarsened(3), Error);
}

TEST_CASE("intrinsics scale with the feature stride") {
  const Intrinsics k = sample_intrinsics().scaled(8);
  CHECK(k.fx == doctest::Approx(62.5));
  CHECK(k.cx == doctest::Approx(40.0));
  CHECK(k.width == 80);
  CHECK(k.height == 60);
}
