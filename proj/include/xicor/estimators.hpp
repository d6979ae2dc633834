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

#include <algorithm>
#include <cstdint>
#include <optional>

#include "xicor/neighbors.hpp"
#include "xicor/sample.hpp"

// The four headline statistics.
//
//   xi_n      = 6/(n^2-1) * sum_i min(R_i, R_N(i)) - (2n+1)/(n-1)
//   xi_bar_n  = 1 - 3/(n^2-1) * sum_i |R_Nbar(i) - R_i|
//
// and their plug-in variance estimators sigma_hat_sq / sigma_bar_hat_sq
// (seven-term displays over ranks, nearest-neighbor indices, mutual flags
// and shared counts; the right-NN version drops the mutual/shared factors,
// which are degenerate for an ordered scan).
//
// Each variance estimator runs in two modes: `naive` enumerates the pair
// sums directly in O(n^2), `optimized` reduces them to sorted prefix sums
// and binary-search counts in O(n log n). Every summand is a small integer
// product, so both modes accumulate exactly (int64/int128) and agree bit
// for bit; the naive mode is kept as the independent oracle.

namespace xicor {

enum class EstimatorKind { nn, right_nn };
enum class Mode { naive, optimized };

struct EstimateReport {
  double coefficient = 0.0;
  std::optional<double> variance_est;  // raw value; may be negative
  bool variance_clamped = false;       // true iff raw value was negative
  int64_t n = 0;
  int d = 0;
  EstimatorKind kind = EstimatorKind::nn;
  Mode mode = Mode::optimized;
  bool ties_flag = false;

  // Non-negative variance for downstream inference; the raw estimate is
  // reported unchanged so a negative value is never papered over silently.
  double variance_for_inference() const {
    return std::max(0.0, variance_est.value());
  }
  double standard_error() const;
};

// Azadkia-Chatterjee coefficient; table must be Euclidean with k_max >= 1.
double xi_n(const Sample& sample, const NeighborTable& table);
double xi_n(const RankVector& ranks, const NeighborTable& table);

// Chatterjee coefficient; table must be a right table (d = 1, distinct x).
double xi_bar_n(const Sample& sample, const NeighborTable& table);
double xi_bar_n(const RankVector& ranks, const NeighborTable& table);

// Variance estimator for xi_n; Euclidean table with k_max >= 3, n >= 4.
double sigma_hat_sq(const Sample& sample, const NeighborTable& table,
                    Mode mode);
double sigma_hat_sq(const RankVector& ranks, const NeighborTable& table,
                    Mode mode);

// Variance estimator for xi_bar_n; right table with k_max >= 3, n >= 2.
double sigma_bar_hat_sq(const Sample& sample, const NeighborTable& table,
                        Mode mode);
double sigma_bar_hat_sq(const RankVector& ranks, const NeighborTable& table,
                        Mode mode);

// One-stop estimation: ranks + table + coefficient (+ variance estimate).
EstimateReport estimate(const Sample& sample, EstimatorKind kind,
                        Mode mode = Mode::optimized, bool with_variance = true);

}  // namespace xicor
