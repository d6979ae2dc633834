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

// AVX2 kernel variants. Compiled with -mavx2 but not -mfma: the distance
// kernel must round exactly like the scalar reference (mul then add), and
// integer lanes are exact anyway.
//
// This translation unit is only built on x86-64; callers reach it through
// the dispatch table, never directly.

#include <immintrin.h>

#include <algorithm>
#include <cstring>

#include "xicor/kernels.hpp"

namespace xicor::kernels {
namespace {

// Horizontal sum of a 4x int64 accumulator.
inline int64_t hsum_epi64(__m256i v) {
  alignas(32) int64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

// Widen 8x int32 to two 4x int64 vectors and add both into acc.
inline __m256i add_widened(__m256i acc, __m256i v32) {
  acc = _mm256_add_epi64(acc, _mm256_cvtepi32_epi64(_mm256_castsi256_si128(v32)));
  acc = _mm256_add_epi64(acc, _mm256_cvtepi32_epi64(_mm256_extracti128_si256(v32, 1)));
  return acc;
}

int64_t sum_min_pairs_avx2(const int32_t* r, const int32_t* nbr,
                           std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256i idx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(nbr + i));
    __m256i rn = _mm256_i32gather_epi32(r, idx, 4);
    __m256i ri = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(r + i));
    acc = add_widened(acc, _mm256_min_epi32(ri, rn));
  }
  int64_t s = hsum_epi64(acc);
  for (; i < n; ++i) {
    s += std::min(r[i], r[nbr[i]]);
  }
  return s;
}

int64_t sum_abs_diff_pairs_avx2(const int32_t* r, const int32_t* nbr,
                                std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256i idx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(nbr + i));
    __m256i rn = _mm256_i32gather_epi32(r, idx, 4);
    __m256i ri = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(r + i));
    acc = add_widened(acc, _mm256_abs_epi32(_mm256_sub_epi32(rn, ri)));
  }
  int64_t s = hsum_epi64(acc);
  for (; i < n; ++i) {
    int32_t d = r[nbr[i]] - r[i];
    s += d < 0 ? -d : d;
  }
  return s;
}

void gather_min_self_avx2(const int32_t* r, const int32_t* idx, int32_t* out,
                          std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256i vi = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(idx + i));
    __m256i rg = _mm256_i32gather_epi32(r, vi, 4);
    __m256i ri = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(r + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        _mm256_min_epi32(ri, rg));
  }
  for (; i < n; ++i) {
    out[i] = std::min(r[i], r[idx[i]]);
  }
}

void gather_min2_avx2(const int32_t* r, const int32_t* idx1,
                      const int32_t* idx2, int32_t* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256i v1 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(idx1 + i));
    __m256i v2 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(idx2 + i));
    __m256i r1 = _mm256_i32gather_epi32(r, v1, 4);
    __m256i r2 = _mm256_i32gather_epi32(r, v2, 4);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        _mm256_min_epi32(r1, r2));
  }
  for (; i < n; ++i) {
    out[i] = std::min(r[idx1[i]], r[idx2[i]]);
  }
}

int64_t sum_sq_flagged_avx2(const int32_t* m, const uint8_t* flag,
                            std::size_t n) {
  // 4-wide in int64 lanes; m < 2^31 so mul_epu32 on the widened lanes is an
  // exact m^2.
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m128i v4 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(m + i));
    __m256i v = _mm256_cvtepi32_epi64(v4);
    __m256i sq = _mm256_mul_epu32(v, v);
    uint32_t fbits;
    std::memcpy(&fbits, flag + i, 4);
    __m256i f = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(static_cast<int>(fbits)));
    __m256i mask = _mm256_sub_epi64(_mm256_setzero_si256(), f);
    acc = _mm256_add_epi64(acc, sq);
    acc = _mm256_add_epi64(acc, _mm256_and_si256(sq, mask));
  }
  int64_t s = hsum_epi64(acc);
  for (; i < n; ++i) {
    int64_t sq = static_cast<int64_t>(m[i]) * m[i];
    s += sq + (flag[i] ? sq : 0);
  }
  return s;
}

int64_t suffix_weighted_sum_avx2(const int32_t* sorted_m, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m128i v4 =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(sorted_m + k));
    __m256i v = _mm256_cvtepi32_epi64(v4);
    int64_t w0 = static_cast<int64_t>(n - 1 - k);
    __m256i w = _mm256_set_epi64x(w0 - 3, w0 - 2, w0 - 1, w0);
    acc = _mm256_add_epi64(acc, _mm256_mul_epu32(v, w));
  }
  int64_t s = hsum_epi64(acc);
  for (; k < n; ++k) {
    s += static_cast<int64_t>(sorted_m[k]) * static_cast<int64_t>(n - 1 - k);
  }
  return s;
}

int64_t sum_i32_avx2(const int32_t* v, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc = add_widened(
        acc, _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v + i)));
  }
  int64_t s = hsum_epi64(acc);
  for (; i < n; ++i) {
    s += v[i];
  }
  return s;
}

void sq_dist_cols_avx2(const double* const* cols, std::size_t d,
                       std::size_t lo, std::size_t hi, const double* q,
                       double* out) {
  std::size_t j = lo;
  for (; j + 4 <= hi; j += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t c = 0; c < d; ++c) {
      __m256d v = _mm256_loadu_pd(cols[c] + j);
      __m256d t = _mm256_sub_pd(v, _mm256_set1_pd(q[c]));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(t, t));
    }
    _mm256_storeu_pd(out + (j - lo), acc);
  }
  for (; j < hi; ++j) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      double t = cols[c][j] - q[c];
      s += t * t;
    }
    out[j - lo] = s;
  }
}

}  // namespace

const KernelFuncs& avx2_funcs() {
  static const KernelFuncs funcs = {
      sum_min_pairs_avx2,      sum_abs_diff_pairs_avx2,
      gather_min_self_avx2,    gather_min2_avx2,
      sum_sq_flagged_avx2,     suffix_weighted_sum_avx2,
      sum_i32_avx2,            sq_dist_cols_avx2,
  };
  return funcs;
}

}  // namespace xicor::kernels
