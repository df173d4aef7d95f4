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

#include "msocc/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "msocc/error.hpp"

namespace msocc {

std::array<AugmentationTag, 8> enumerate_tta() {
  std::array<AugmentationTag, 8> tags{};
  for (int i = 0; i < 8; ++i) {
    tags[static_cast<std::size_t>(i)] = AugmentationTag{(i & 4) != 0, (i & 2) != 0, (i & 1) != 0};
  }
  return tags;
}

template <typename T>
Tensor<T> flip_grid_axis(const Tensor<T>& t, int axis) {
  require(t.rank() == 3 || t.rank() == 4, "flip: expected a grid with optional channel axis");
  require(axis >= 0 && axis < 3, "flip: axis must be 0, 1 or 2");
  const std::size_t lead = t.rank() == 4 ? t.dim(0) : 1;
  const std::size_t off = t.rank() - 3;
  const std::size_t nx = t.dim(off), ny = t.dim(off + 1), nz = t.dim(off + 2);
  const std::size_t cells = nx * ny * nz;
  Tensor<T> out(t.shape());
#pragma omp parallel for collapse(2) schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(lead); ++c) {
    for (std::ptrdiff_t x = 0; x < static_cast<std::ptrdiff_t>(nx); ++x) {
      for (std::size_t y = 0; y < ny; ++y) {
        for (std::size_t z = 0; z < nz; ++z) {
          std::size_t sx = static_cast<std::size_t>(x), sy = y, sz = z;
          if (axis == 0) sx = nx - 1 - sx;
          if (axis == 1) sy = ny - 1 - sy;
          if (axis == 2) sz = nz - 1 - sz;
          const std::size_t base = static_cast<std::size_t>(c) * cells;
          out[base + (static_cast<std::size_t>(x) * ny + y) * nz + z] = t[base + (sx * ny + sy) * nz + sz];
        }
      }
    }
  }
  return out;
}

template Tensor<double> flip_grid_axis(const Tensor<double>&, int);
template Tensor<float> flip_grid_axis(const Tensor<float>&, int);
template Tensor<std::uint8_t> flip_grid_axis(const Tensor<std::uint8_t>&, int);

PredictionEntry apply_flips(const PredictionEntry& entry, FlipAxes axes) {
  PredictionEntry out = entry;
  if (entry.tag.vox_flip_x) {
    out.occ = flip_grid_axis(out.occ, axes.horizontal);
    out.sem = flip_grid_axis(out.sem, axes.horizontal);
  }
  if (entry.tag.vox_flip_y) {
    out.occ = flip_grid_axis(out.occ, axes.vertical);
    out.sem = flip_grid_axis(out.sem, axes.vertical);
  }
  return out;
}

PredictionEntry deaugment(const PredictionEntry& entry, FlipAxes axes) {
  return apply_flips(entry, axes);
}

namespace {

constexpr double kRowSumTolerance = 1e-4;

void validate_shapes(const PredictionSet& set, const Shape& occ_shape, const Shape& sem_shape,
                     const char* name) {
  require(!set.entries.empty(), std::string("ensemble: prediction set ") + name + " is empty");
  for (const auto& e : set.entries) {
    require_shape(e.occ, occ_shape, std::string("ensemble: ") + name + " occupancy");
    require_shape(e.sem, sem_shape, std::string("ensemble: ") + name + " semantics");
  }
}

// Serial value checks. The ensemble kernel screens values on the fly and only
// calls this to report the first offending cell.
void validate_values(const PredictionSet& set, std::size_t cells, std::size_t classes) {
  for (const auto& e : set.entries) {
    require_finite(e.occ, "occupancy probabilities");
    require_finite(e.sem, "semantic probabilities");
    for (std::size_t i = 0; i < cells; ++i) {
      require(e.occ[i] >= 0.0 && e.occ[i] <= 1.0, "occupancy probability outside [0, 1]");
    }
    // Row sums accumulated class-major so each class plane is read contiguously.
    std::vector<double> rows(cells, 0.0);
    for (std::size_t c = 0; c < classes; ++c) {
      const double* plane = e.sem.data() + c * cells;
      for (std::size_t i = 0; i < cells; ++i) rows[i] += plane[i];
    }
    for (std::size_t i = 0; i < cells; ++i) {
      if (!(std::abs(rows[i] - 1.0) <= kRowSumTolerance)) {
        fail_validation("semantic probabilities do not sum to 1 at cell " + std::to_string(i));
      }
    }
  }
}

// Entry order sorted by tag so equal sets give identical sums.
std::vector<std::size_t> tag_order(const PredictionSet& set) {
  std::vector<std::size_t> order(set.entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return set.entries[i].tag < set.entries[j].tag;
  });
  return order;
}

}  // namespace

EnsembleResult ensemble(const PredictionSet& a, const PredictionSet& b, const EnsembleConfig& cfg) {
  require(cfg.weight_a > 0.0 && cfg.weight_b > 0.0, "ensemble weights must be positive");
  require(!a.entries.empty() && !b.entries.empty(), "ensemble: prediction sets must be non-empty");
  const Shape occ_shape = a.entries.front().occ.shape();
  const Shape sem_shape = a.entries.front().sem.shape();
  require(occ_shape.size() == 3 && sem_shape.size() == 4 &&
              Shape(sem_shape.begin() + 1, sem_shape.end()) == occ_shape,
          "ensemble: expected nx x ny x nz occupancy and K x nx x ny x nz semantics");
  require(sem_shape[0] >= 1 && sem_shape[0] < kFreeLabel, "ensemble: unsupported class count");
  validate_shapes(a, occ_shape, sem_shape, "a");
  validate_shapes(b, occ_shape, sem_shape, "b");

  const std::size_t cells = element_count(occ_shape);
  const std::size_t classes = sem_shape[0];
  const auto order_a = tag_order(a);
  const auto order_b = tag_order(b);
  const double norm = cfg.weight_a * static_cast<double>(a.entries.size()) +
                      cfg.weight_b * static_cast<double>(b.entries.size());

  EnsembleResult out{Tensor<double>(occ_shape), LabelGrid(occ_shape)};
  constexpr std::size_t kBlock = 1024;
  const std::size_t blocks = (cells + kBlock - 1) / kBlock;
  bool bad_input = false;
#pragma omp parallel reduction(|| : bad_input)
  {
    std::vector<double> occ_a(kBlock), occ_b(kBlock), sem_a(classes * kBlock), sem_b(classes * kBlock);
    std::vector<double> rows(kBlock);
#pragma omp for schedule(static)
    for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(blocks); ++blk) {
      const std::size_t begin = static_cast<std::size_t>(blk) * kBlock;
      const std::size_t n = std::min(kBlock, cells - begin);
      auto accumulate = [&](const PredictionSet& set, const std::vector<std::size_t>& order,
                            std::vector<double>& occ, std::vector<double>& sem) {
        std::fill(occ.begin(), occ.end(), 0.0);
        std::fill(sem.begin(), sem.end(), 0.0);
        for (std::size_t k : order) {
          const auto& e = set.entries[k];
          for (std::size_t j = 0; j < n; ++j) {
            const double p = e.occ[begin + j];
            bad_input = bad_input || !(p >= 0.0 && p <= 1.0);
            occ[j] += p;
          }
          std::fill(rows.begin(), rows.end(), 0.0);
          for (std::size_t c = 0; c < classes; ++c) {
            const double* plane = e.sem.data() + c * cells + begin;
            double* acc = sem.data() + c * kBlock;
            for (std::size_t j = 0; j < n; ++j) {
              acc[j] += plane[j];
              rows[j] += plane[j];
            }
          }
          // non-finite entries make the row sum non-finite and fail here too
          for (std::size_t j = 0; j < n; ++j) {
            bad_input = bad_input || !(std::abs(rows[j] - 1.0) <= kRowSumTolerance);
          }
        }
      };
      accumulate(a, order_a, occ_a, sem_a);
      accumulate(b, order_b, occ_b, sem_b);

      for (std::size_t j = 0; j < n; ++j) {
        out.occ[begin + j] = std::clamp((cfg.weight_a * occ_a[j] + cfg.weight_b * occ_b[j]) / norm, 0.0, 1.0);
        std::size_t best = 0;
        double best_score = -1.0;
        for (std::size_t c = 0; c < classes; ++c) {
          const double score = (cfg.weight_a * sem_a[c * kBlock + j] + cfg.weight_b * sem_b[c * kBlock + j]) / norm;
          if (score > best_score) {
            best_score = score;
            best = c;
          }
        }
        out.sem[begin + j] = static_cast<std::uint8_t>(best);
      }
    }
  }
  if (bad_input) {
    validate_values(a, cells, classes);
    validate_values(b, cells, classes);
    fail_validation("ensemble: invalid prediction values");
  }
  return out;
}

ThresholdTable::ThresholdTable(std::vector<double> thresholds) : thresholds_(std::move(thresholds)) {
  for (double t : thresholds_) {
    require(t > 0.0 && t < 1.0, "thresholds must lie in (0, 1)");
  }
}

ThresholdTable ThresholdTable::default_table() {
  return ThresholdTable({
      0.92,  // Others
      0.94,  // Barrier
      0.94,  // Bicycle
      0.94,  // Bus
      0.93,  // Car
      0.93,  // Construction Vehicle
      0.91,  // Motorcycle
      0.91,  // Pedestrian
      0.91,  // Traffic Cone
      0.93,  // Trailer
      0.93,  // Truck
      0.96,  // Driveable Surface
      0.95,  // Other Flat
      0.95,  // Sidewalk
      0.95,  // Terrain
      0.93,  // Manmade
      0.92,  // Vegetation
  });
}

double ThresholdTable::threshold(std::uint8_t label) const {
  if (label >= thresholds_.size()) {
    fail_validation("label " + std::to_string(label) + " missing from threshold table");
  }
  return thresholds_[label];
}

ThresholdTable parse_threshold_table(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail_validation(std::string("threshold table: invalid JSON: ") + e.what());
  }
  require(j.is_object(), "threshold table must be a JSON object of class name -> threshold");
  std::vector<double> values(kNumClasses);
  for (std::size_t c = 0; c < kClassNames.size(); ++c) {
    const std::string name(kClassNames[c]);
    require(j.contains(name), "threshold table is missing class \"" + name + "\"");
    require(j[name].is_number(), "threshold for \"" + name + "\" is not a number");
    values[c] = j[name].get<double>();
    require(values[c] > 0.0 && values[c] < 1.0, "threshold for \"" + name + "\" outside (0, 1)");
  }
  for (const auto& [key, _] : j.items()) {
    require(std::find(kClassNames.begin(), kClassNames.end(), key) != kClassNames.end(),
            "threshold table has unknown class \"" + key + "\"");
  }
  return ThresholdTable(std::move(values));
}

ThresholdTable load_threshold_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open threshold table " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_threshold_table(buf.str());
}

LabelGrid apply_thresholds(const Tensor<double>& occ, const LabelGrid& sem,
                           const ThresholdTable& table) {
  require_shape(sem, occ.shape(), "semantic labels");
  require_finite(occ, "occupancy probabilities");
  LabelGrid out(occ.shape());
  for (std::size_t i = 0; i < occ.size(); ++i) {
    const std::uint8_t label = sem[i];
    out[i] = occ[i] < table.threshold(label) ? kFreeLabel : label;
  }
  return out;
}

}  // namespace msocc
