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

#include <algorithm>
#include <cstddef>
#include <vector>

namespace msocc {

/// Number of OpenMP threads the kernels will use (1 without OpenMP).
int max_threads();

/// Sets the kernel thread count; values < 1 restore the runtime default.
void set_threads(int threads);

/// Partial sums are formed over fixed-size chunks so the reduction tree, and
/// therefore the rounding, does not depend on the thread count.
inline constexpr std::size_t kReductionChunk = 4096;

double pairwise_sum(std::vector<double> partials);

/// Deterministic parallel sum of term(i) for i in [0, n).
template <typename Term>
double deterministic_sum(std::size_t n, Term&& term) {
  const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
  std::vector<double> partials(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
    const std::size_t end = std::min(n, begin + kReductionChunk);
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    partials[static_cast<std::size_t>(c)] = acc;
  }
  return pairwise_sum(std::move(partials));
}

}  // namespace msocc
