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
#include <span>
#include <vector>

#include "xicor/errors.hpp"

namespace xicor {

// A validated sample of n observations: a d-dimensional covariate row plus a
// scalar response each. Coordinates are finite 64-bit floats; comparisons
// downstream are exact (no epsilon), so ranks and neighbor tables are
// reproducible bit for bit.
class Sample {
 public:
  int64_t n() const { return n_; }
  int d() const { return d_; }

  std::span<const double> x_row(int64_t i) const {
    return {x_.data() + i * d_, static_cast<std::size_t>(d_)};
  }
  double x(int64_t i, int c) const { return x_[i * d_ + c]; }
  double y(int64_t i) const { return y_[i]; }
  const std::vector<double>& x_flat() const { return x_; }
  const std::vector<double>& y_values() const { return y_; }

  // Ties in y violate the continuity assumption the estimators' theory rests
  // on; they are surfaced, not rejected.
  bool has_y_ties() const { return y_ties_; }
  bool has_duplicate_x() const { return x_dups_; }

 private:
  friend Sample validate_sample(std::vector<double> x_flat,
                                std::vector<double> y, int d);
  Sample() = default;

  int64_t n_ = 0;
  int d_ = 0;
  std::vector<double> x_;  // row-major n*d
  std::vector<double> y_;
  bool y_ties_ = false;
  bool x_dups_ = false;
};

// Per-observation ranks r_i = #{j : y_j <= y_i} (max rank under ties).
struct RankVector {
  std::vector<int32_t> r;
};

// Validates raw data into a Sample. Throws EmptySampleError,
// NonFiniteValueError, or DimensionMismatchError.
Sample validate_sample(std::vector<double> x_flat, std::vector<double> y,
                       int d);

// Convenience overload for row-wise input (used by tests and the CSV layer).
Sample validate_sample(const std::vector<std::vector<double>>& x_rows,
                       const std::vector<double>& y);

// O(n log n) ranks by sorting.
RankVector compute_ranks(const Sample& sample);

// O(n^2) ranks by direct evaluation of the defining count; testing oracle.
RankVector compute_ranks_counting(const Sample& sample);

}  // namespace xicor
