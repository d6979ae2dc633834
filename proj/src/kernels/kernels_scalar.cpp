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

// Scalar reference kernels. These are the ground truth the SIMD variants are
// equivalence-tested against; keep them obvious.

#include <algorithm>

#include "xicor/kernels.hpp"

namespace xicor::kernels {
namespace {

int64_t sum_min_pairs_scalar(const int32_t* r, const int32_t* nbr,
                             std::size_t n) {
  int64_t s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s += std::min(r[i], r[nbr[i]]);
  }
  return s;
}

int64_t sum_abs_diff_pairs_scalar(const int32_t* r, const int32_t* nbr,
                                  std::size_t n) {
  int64_t s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int32_t d = r[nbr[i]] - r[i];
    s += d < 0 ? -d : d;
  }
  return s;
}

void gather_min_self_scalar(const int32_t* r, const int32_t* idx, int32_t* out,
                            std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::min(r[i], r[idx[i]]);
  }
}

void gather_min2_scalar(const int32_t* r, const int32_t* idx1,
                        const int32_t* idx2, int32_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::min(r[idx1[i]], r[idx2[i]]);
  }
}

int64_t sum_sq_flagged_scalar(const int32_t* m, const uint8_t* flag,
                              std::size_t n) {
  int64_t s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int64_t sq = static_cast<int64_t>(m[i]) * m[i];
    s += sq + (flag[i] ? sq : 0);
  }
  return s;
}

int64_t suffix_weighted_sum_scalar(const int32_t* sorted_m, std::size_t n) {
  int64_t s = 0;
  for (std::size_t k = 0; k < n; ++k) {
    s += static_cast<int64_t>(sorted_m[k]) *
         static_cast<int64_t>(n - 1 - k);
  }
  return s;
}

int64_t sum_i32_scalar(const int32_t* v, std::size_t n) {
  int64_t s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s += v[i];
  }
  return s;
}

void sq_dist_cols_scalar(const double* const* cols, std::size_t d,
                         std::size_t lo, std::size_t hi, const double* q,
                         double* out) {
  for (std::size_t j = lo; j < hi; ++j) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      double t = cols[c][j] - q[c];
      s += t * t;
    }
    out[j - lo] = s;
  }
}

}  // namespace

const KernelFuncs& scalar_funcs() {
  static const KernelFuncs funcs = {
      sum_min_pairs_scalar,      sum_abs_diff_pairs_scalar,
      gather_min_self_scalar,    gather_min2_scalar,
      sum_sq_flagged_scalar,     suffix_weighted_sum_scalar,
      sum_i32_scalar,            sq_dist_cols_scalar,
  };
  return funcs;
}

}  // namespace xicor::kernels
