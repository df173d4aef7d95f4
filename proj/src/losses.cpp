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

#include "msocc/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "msocc/error.hpp"
#include "msocc/parallel.hpp"

namespace msocc {
namespace {

void normalize_to_mean_one(std::span<double> w) {
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  for (double& x : w) x /= mean;
}

double inverse_frequency(std::size_t count, std::size_t total) {
  const double freq = total ? static_cast<double>(count) / static_cast<double>(total) : 0.0;
  return 1.0 / std::max(freq, kFrequencyFloor);
}

void check_weights(const ClassWeights& w, int num_classes) {
  require(w.sem.size() == static_cast<std::size_t>(num_classes),
          "class weights: expected " + std::to_string(num_classes) + " semantic weights");
  for (double x : w.sem) require(x > 0.0 && std::isfinite(x), "class weights must be positive");
  require(w.occ[0] > 0.0 && w.occ[1] > 0.0, "occupancy weights must be positive");
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

ClassWeights ClassWeights::uniform(int num_classes) {
  require(num_classes >= 1, "need at least one class");
  ClassWeights w;
  w.sem.assign(static_cast<std::size_t>(num_classes), 1.0);
  return w;
}

ClassWeights ClassWeights::scaled(double factor) const {
  ClassWeights out = *this;
  for (double& x : out.occ) x *= factor;
  for (double& x : out.sem) x *= factor;
  return out;
}

ClassWeights class_frequency_weights(const SemanticGrid& sem, const OccupancyGrid& occ,
                                     const CameraMask& mask, int num_classes) {
  require(num_classes >= 1, "need at least one class");
  require(sem.shape() == occ.shape() && mask.shape() == occ.shape(),
          "class weights: grid shapes differ");
  std::array<std::size_t, 2> occ_counts{0, 0};
  std::vector<std::size_t> sem_counts(static_cast<std::size_t>(num_classes), 0);
  std::size_t masked = 0;
  std::size_t occupied = 0;
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (!mask[i]) continue;
    ++masked;
    require(occ[i] <= 1, "occupancy values must be 0 or 1");
    ++occ_counts[occ[i]];
    if (occ[i]) {
      if (sem[i] >= num_classes) {
        fail_validation("semantic label " + std::to_string(sem[i]) + " outside [0, " +
                        std::to_string(num_classes) + ")");
      }
      ++sem_counts[sem[i]];
      ++occupied;
    }
  }
  require(masked > 0, "class weights: camera mask is empty");

  ClassWeights w;
  for (int b = 0; b < 2; ++b) w.occ[b] = inverse_frequency(occ_counts[b], masked);
  w.sem.resize(sem_counts.size());
  for (std::size_t c = 0; c < sem_counts.size(); ++c) {
    w.sem[c] = inverse_frequency(sem_counts[c], occupied);
  }
  normalize_to_mean_one(w.occ);
  normalize_to_mean_one(w.sem);
  return w;
}

LossValue bce_occ_loss(const Tensor<double>& occ_logits, const OccupancyGrid& gt,
                       const CameraMask& mask, const ClassWeights& weights) {
  require_shape(gt, occ_logits.shape(), "occupancy ground truth");
  require_shape(mask, occ_logits.shape(), "camera mask");
  require_finite(occ_logits, "occupancy logits");
  require(weights.occ[0] > 0.0 && weights.occ[1] > 0.0, "occupancy weights must be positive");

  const std::size_t n = occ_logits.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    count += mask[i] != 0;
    require(gt[i] <= 1, "occupancy values must be 0 or 1");
  }
  require(count > 0, "occupancy loss: camera mask is empty");

  LossValue out{0.0, Tensor<double>(occ_logits.shape())};
  const double inv_count = 1.0 / static_cast<double>(count);
  double* grad = out.gradient.data();
  out.value = deterministic_sum(n, [&](std::size_t i) {
    if (!mask[i]) return 0.0;
    const double z = occ_logits[i];
    const double y = gt[i];
    const double w = weights.occ[gt[i]];
    grad[i] = w * (sigmoid(z) - y) * inv_count;
    return w * (softplus(z) - z * y);
  }) * inv_count;
  return out;
}

LossValue focal_sem_loss(const Tensor<double>& sem_logits, const SemanticGrid& gt,
                         const OccupancyGrid& occ_gt, const CameraMask& mask,
                         const ClassWeights& weights, double gamma) {
  require(gamma >= 0.0, "focal loss: gamma must be >= 0");
  require(sem_logits.rank() == 4, "semantic logits must be K x nx x ny x nz");
  const Shape grid_shape(sem_logits.shape().begin() + 1, sem_logits.shape().end());
  require_shape(gt, grid_shape, "semantic ground truth");
  require_shape(occ_gt, grid_shape, "occupancy ground truth");
  require_shape(mask, grid_shape, "camera mask");
  require_finite(sem_logits, "semantic logits");
  const std::size_t classes = sem_logits.dim(0);
  check_weights(weights, static_cast<int>(classes));

  const std::size_t cells = gt.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < cells; ++i) {
    if (!mask[i] || !occ_gt[i]) continue;
    if (gt[i] >= classes) {
      fail_validation("semantic label " + std::to_string(gt[i]) +
                      " of an occupied voxel is outside the class range");
    }
    ++count;
  }
  require(count > 0, "focal loss: no masked occupied voxels");

  LossValue out{0.0, Tensor<double>(sem_logits.shape())};
  const double inv_count = 1.0 / static_cast<double>(count);
  const double* z = sem_logits.data();
  double* grad = out.gradient.data();
  out.value = deterministic_sum(cells, [&](std::size_t i) {
    if (!mask[i] || !occ_gt[i]) return 0.0;
    const std::size_t target = gt[i];
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < classes; ++c) peak = std::max(peak, z[c * cells + i]);
    double denom = 0.0;
    for (std::size_t c = 0; c < classes; ++c) denom += std::exp(z[c * cells + i] - peak);
    const double log_denom = peak + std::log(denom);
    const double log_p = z[target * cells + i] - log_denom;
    const double p = std::exp(log_p);
    const double q = -std::expm1(log_p);  // 1 - p
    const double w = weights.sem[target];
    const double modulator = std::pow(q, gamma);

    // d/dz_j [-(1-p)^g log p] = [g (1-p)^(g-1) p log p - (1-p)^g] (delta_tj - p_j)
    const double focal_term =
        (gamma > 0.0 && q > 0.0) ? gamma * std::pow(q, gamma - 1.0) * p * log_p : 0.0;
    const double coef = w * (focal_term - modulator) * inv_count;
    for (std::size_t c = 0; c < classes; ++c) {
      const double pc = std::exp(z[c * cells + i] - log_denom);
      grad[c * cells + i] = coef * ((c == target ? 1.0 : 0.0) - pc);
    }
    return -w * modulator * log_p;
  }) * inv_count;
  return out;
}

LossValue depth_loss(const Tensor<double>& depth_logits, const Tensor<double>& gt_depth,
                     const Tensor<std::uint8_t>& valid, const FrustumSpec& f) {
  f.validate();
  const bool batched = depth_logits.rank() == 4;
  require(depth_logits.rank() == 3 || batched, "depth logits must be D x H x W or N x D x H x W");
  const std::size_t cameras = batched ? depth_logits.dim(0) : 1;
  const std::size_t bins = depth_logits.dim(batched ? 1 : 0);
  const std::size_t height = depth_logits.dim(batched ? 2 : 1);
  const std::size_t width = depth_logits.dim(batched ? 3 : 2);
  require(bins == static_cast<std::size_t>(f.depth_bins()),
          "depth logits have " + std::to_string(bins) + " bins, frustum spec has " +
              std::to_string(f.depth_bins()));
  const Shape target_shape = batched ? Shape{cameras, height, width} : Shape{height, width};
  require_shape(gt_depth, target_shape, "ground-truth depth");
  require_shape(valid, target_shape, "depth validity");
  require_finite(depth_logits, "depth logits");

  const std::size_t plane = height * width;
  const std::size_t pixels = cameras * plane;
  std::vector<int> target_bin(pixels, -1);
  std::size_t count = 0;
  for (std::size_t i = 0; i < pixels; ++i) {
    if (!valid[i]) continue;
    const auto bin = f.bin_of(gt_depth[i]);
    if (!bin) {
      fail_validation("valid ground-truth depth " + std::to_string(gt_depth[i]) +
                      " outside [depth_min, depth_max)");
    }
    target_bin[i] = *bin;
    ++count;
  }
  require(count > 0, "depth loss: no valid pixels");

  LossValue out{0.0, Tensor<double>(depth_logits.shape())};
  const double inv_count = 1.0 / static_cast<double>(count);
  const double* z = depth_logits.data();
  double* grad = out.gradient.data();
  out.value = deterministic_sum(pixels, [&](std::size_t i) {
    if (target_bin[i] < 0) return 0.0;
    const std::size_t cam = i / plane;
    const std::size_t px = i % plane;
    const double* zc = z + cam * bins * plane + px;
    double* gc = grad + cam * bins * plane + px;
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < bins; ++d) peak = std::max(peak, zc[d * plane]);
    double denom = 0.0;
    for (std::size_t d = 0; d < bins; ++d) denom += std::exp(zc[d * plane] - peak);
    const double log_denom = peak + std::log(denom);
    const auto t = static_cast<std::size_t>(target_bin[i]);
    for (std::size_t d = 0; d < bins; ++d) {
      const double p = std::exp(zc[d * plane] - log_denom);
      gc[d * plane] = (p - (d == t ? 1.0 : 0.0)) * inv_count;
    }
    return log_denom - zc[t * plane];
  }) * inv_count;
  return out;
}

std::vector<double> default_scale_weights(int scale_count) {
  std::vector<double> alpha(static_cast<std::size_t>(scale_count));
  for (int i = 0; i < scale_count; ++i) alpha[static_cast<std::size_t>(i)] = std::ldexp(1.0, -i);
  return alpha;
}

LossReport total_loss(std::span<const ScaleLoss> scales) {
  const auto alpha = default_scale_weights(3);
  return total_loss(scales, alpha);
}

LossReport total_loss(std::span<const ScaleLoss> scales, std::span<const double> alpha) {
  require(scales.size() == alpha.size(),
          "total loss: " + std::to_string(scales.size()) + " scales but " +
              std::to_string(alpha.size()) + " scale weights");
  LossReport report;
  report.scales.assign(scales.begin(), scales.end());
  report.alpha.assign(alpha.begin(), alpha.end());
  for (std::size_t i = 0; i < scales.size(); ++i) {
    report.scale_totals.push_back(scales[i].total());
    report.total += alpha[i] * scales[i].total();
  }
  return report;
}

}  // namespace msocc
