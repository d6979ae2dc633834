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

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops shared by the rank estimators and the k-NN index.
//
// Every kernel exists in a scalar reference version and (on x86-64) an AVX2
// version; the active backend is picked once at startup from CPUID and can be
// overridden with the XICOR_KERNELS environment variable or set_backend().
// The two backends are bit-identical: integer kernels are exact, and the
// distance kernel performs the per-element operations in the same order in
// both versions, so equivalence tests compare with operator==.
//
// Rank inputs are int32 values in [1, n]; index inputs are 0-based int32.
// All integer accumulations are exact in int64 (products of two ranks stay
// below 2^53 even at n = 1e7, and sums of n such products stay below 2^63
// for every n the library accepts).

namespace xicor::kernels {

struct KernelFuncs {
  // sum over i of min(r[i], r[nbr[i]])
  int64_t (*sum_min_pairs)(const int32_t* r, const int32_t* nbr, std::size_t n);
  // sum over i of |r[nbr[i]] - r[i]|
  int64_t (*sum_abs_diff_pairs)(const int32_t* r, const int32_t* nbr,
                                std::size_t n);
  // out[i] = min(r[i], r[idx[i]])
  void (*gather_min_self)(const int32_t* r, const int32_t* idx, int32_t* out,
                          std::size_t n);
  // out[i] = min(r[idx1[i]], r[idx2[i]])
  void (*gather_min2)(const int32_t* r, const int32_t* idx1,
                      const int32_t* idx2, int32_t* out, std::size_t n);
  // sum over i of m[i]^2 * (1 + flag[i]), flag in {0,1}
  int64_t (*sum_sq_flagged)(const int32_t* m, const uint8_t* flag,
                            std::size_t n);
  // sum over k (0-based) of m[k] * (n - 1 - k); m ascending for the
  // pair-sum identity sum_{i!=j} min(m_i, m_j) = 2 * this
  int64_t (*suffix_weighted_sum)(const int32_t* sorted_m, std::size_t n);
  // plain sum as int64
  int64_t (*sum_i32)(const int32_t* v, std::size_t n);
  // out[j - lo] = sum_c (cols[c][j] - q[c])^2 for j in [lo, hi);
  // cols holds d column-contiguous coordinate arrays
  void (*sq_dist_cols)(const double* const* cols, std::size_t d,
                       std::size_t lo, std::size_t hi, const double* q,
                       double* out);
};

enum class Backend { scalar, avx2 };

// Active function table (resolved once, overridable for tests).
const KernelFuncs& active();
Backend active_backend();
void set_backend(Backend b);
bool avx2_available();

const KernelFuncs& scalar_funcs();
#if defined(XICOR_HAVE_AVX2)
const KernelFuncs& avx2_funcs();
#endif

}  // namespace xicor::kernels
