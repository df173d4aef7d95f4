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

// Parallel kernels next to their serial reference loops. Each parallel
// benchmark takes the thread count as its argument; the reference versions
// always run on one thread.
//
//   ./build/bench/bench_kernels --benchmark_filter=Lift

#include <benchmark/benchmark.h>

#include <vector>

#include "instances.hpp"
#include "msocc/fixtures.hpp"
#include "msocc/lift_splat.hpp"
#include "msocc/parallel.hpp"
#include "msocc/postprocess.hpp"
#include "msocc/reference/naive_kernels.hpp"
#include "msocc/temporal.hpp"

using namespace msocc;
using msocc::testing::Rng;

namespace {

struct LiftCase {
  CameraRig rig;
  FrustumSpec frustum;
  VoxelGridSpec grid;
  std::vector<FeatureMap> features;
  std::vector<DepthDistribution> depths;
  PoolingIndex index;
};

const LiftCase& lift_case() {
  static const LiftCase c = [] {
    LiftCase out;
    out.rig = make_surround_rig(6, 704, 256).scaled(16);
    out.frustum = FrustumSpec{44, 16, 16, 1.0, 60.0, 1.0};
    out.grid = VoxelGridSpec::full_default().coarsened(2);
    Rng rng(7);
    for (std::size_t i = 0; i < out.rig.size(); ++i) {
      out.features.push_back(FeatureMap{testing::random_tensor(rng, {32, 16, 44}), 16});
      out.depths.push_back(normalize_depth_logits(testing::random_tensor(rng, {59, 16, 44}, -2, 2)));
    }
    out.index = build_pooling_index(out.rig, out.frustum, out.grid);
    return out;
  }();
  return c;
}

void BM_LiftAndPool(benchmark::State& state) {
  const auto& c = lift_case();
  set_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lift_and_pool(c.features, c.depths, c.index));
  state.counters["contributions"] = static_cast<double>(c.index.entries.size());
}
BENCHMARK(BM_LiftAndPool)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_BuildPoolingIndex(benchmark::State& state) {
  const auto& c = lift_case();
  set_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_pooling_index(c.rig, c.frustum, c.grid));
}
BENCHMARK(BM_BuildPoolingIndex)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_LiftScatterReference(benchmark::State& state) {
  const auto& c = lift_case();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::lift_scatter(c.rig, c.frustum, c.grid, c.features, c.depths));
  }
}
BENCHMARK(BM_LiftScatterReference)->Unit(benchmark::kMillisecond);

struct CostCase {
  TexturedPlanePair pair;
  FrustumSpec frustum;
};

const CostCase& cost_case() {
  static const CostCase c = [] {
    const Intrinsics k{96.0, 96.0, 88.0, 32.0, 176, 64};
    return CostCase{textured_plane_features(12.5, k, 32, 3), FrustumSpec{176, 64, 4, 1.0, 60.0, 1.0}};
  }();
  return c;
}

void BM_CostVolume(benchmark::State& state) {
  const auto& c = cost_case();
  set_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        build_cost_volume(c.pair.cur, c.pair.prev, c.pair.prev_to_cur, c.pair.camera, c.frustum));
  }
}
BENCHMARK(BM_CostVolume)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_CostVolumeReference(benchmark::State& state) {
  const auto& c = cost_case();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reference::cost_volume(c.pair.cur, c.pair.prev, c.pair.prev_to_cur, c.pair.camera, c.frustum));
  }
}
BENCHMARK(BM_CostVolumeReference)->Unit(benchmark::kMillisecond);

struct WarpCase {
  VoxelFeatureGrid grid;
  RigidTransform motion;
};

const WarpCase& warp_case() {
  static const WarpCase c = [] {
    Rng rng(11);
    const VoxelGridSpec g = VoxelGridSpec::full_default().coarsened(2);
    VoxelFeatureGrid grid{testing::random_tensor(rng, {16, 100, 100, 8}), g};
    return WarpCase{std::move(grid), RigidTransform::from_yaw(0.05, Vec3(1.3, -0.4, 0.0))};
  }();
  return c;
}

void BM_Warp(benchmark::State& state) {
  const auto& c = warp_case();
  set_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(warp_voxel_grid(c.grid, c.motion, WarpMode::kTrilinear));
}
BENCHMARK(BM_Warp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_WarpReference(benchmark::State& state) {
  const auto& c = warp_case();
  for (auto _ : state) benchmark::DoNotOptimize(reference::trilinear_warp(c.grid.values, c.grid.spec, c.motion));
}
BENCHMARK(BM_WarpReference)->Unit(benchmark::kMillisecond);

std::pair<PredictionSet, PredictionSet> ensemble_case() {
  Rng rng(13);
  const Shape grid{100, 100, 8};
  const std::size_t cells = element_count(grid);
  auto make = [&] {
    PredictionSet s;
    for (const auto& tag : enumerate_tta()) {
      PredictionEntry e{tag, testing::random_tensor(rng, grid, 0, 1),
                        testing::random_tensor(rng, {17, 100, 100, 8}, 0.01, 1)};
      for (std::size_t i = 0; i < cells; ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 17; ++c) sum += e.sem[c * cells + i];
        for (std::size_t c = 0; c < 17; ++c) e.sem[c * cells + i] /= sum;
      }
      s.entries.push_back(std::move(e));
    }
    return s;
  };
  auto a = make();
  auto b = make();
  return {std::move(a), std::move(b)};
}

void BM_Ensemble(benchmark::State& state) {
  static const auto sets = ensemble_case();
  set_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ensemble(sets.first, sets.second));
}
BENCHMARK(BM_Ensemble)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_EnsembleReference(benchmark::State& state) {
  static const auto sets = ensemble_case();
  for (auto _ : state) benchmark::DoNotOptimize(reference::ensemble_loop(sets.first, sets.second, {}));
}
BENCHMARK(BM_EnsembleReference)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
