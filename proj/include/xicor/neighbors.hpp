// Copyright 2026 the xicor authors
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

#include <cstdint>
#include <vector>

#include "xicor/sample.hpp"

namespace xicor {

enum class NeighborKind { euclidean, right };

// Per-observation neighbor indices N_1..N_k_max (0-based), plus the mutual
// flag 1(i == N(N(i))) and the shared count |{j : j != i, N(j) = N(i)}|
// derived from the first column.
//
// Euclidean tables order candidates by (squared distance, index): exact
// nearest neighbors with ties broken toward the smallest index. Right tables
// (d = 1, distinct x) point to the k-th smallest x strictly above x_i, with
// the identity fallback when x_i is among the k largest.
struct NeighborTable {
  NeighborKind kind;
  int k_max;
  int64_t n;
  std::vector<int32_t> nbr;          // column-major: nbr[(k-1)*n + i]
  std::vector<uint8_t> mutual;       // n
  std::vector<int32_t> shared_count; // n

  int32_t neighbor(int64_t i, int k) const {
    return nbr[static_cast<int64_t>(k - 1) * n + i];
  }
  const int32_t* column(int k) const {
    return nbr.data() + static_cast<int64_t>(k - 1) * n;
  }
};

struct NnOptions {
  // Above this dimension the spatial index loses to a straight scan at the
  // sample sizes this library targets.
  int brute_force_dim_threshold = 8;
};

// Exact k-NN table in the Euclidean metric (kd-tree for small d, linear scan
// otherwise). Requires n >= k_max + 1. Throws TooFewPointsError.
NeighborTable build_nn_table(const Sample& sample, int k_max,
                             const NnOptions& opts = {});

// Right-NN table for d = 1 with distinct x. Throws NotUnivariateError or
// DuplicateXError.
NeighborTable build_right_nn_table(const Sample& sample, int k_max);

// O(n^2) full-sort-per-point oracle, identical output to build_nn_table.
NeighborTable nn_brute_force_oracle(const Sample& sample, int k_max);

}  // namespace xicor
