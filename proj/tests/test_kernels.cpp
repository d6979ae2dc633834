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

// Backend equivalence: the AVX2 kernels must reproduce the scalar reference
// exactly (integers are exact; the distance kernel keeps the per-element
// operation order, so doubles match bitwise too).

#include <doctest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "xicor/kernels.hpp"

namespace {

using namespace xicor::kernels;

const std::vector<std::size_t> kSizes = {0, 1, 3, 4, 7, 8, 9, 15, 31, 64, 101, 1000};

struct RankCase {
  std::vector<int32_t> r;
  std::vector<int32_t> idx1;
  std::vector<int32_t> idx2;
  std::vector<uint8_t> flags;
};

RankCase make_case(std::size_t n, std::mt19937& gen) {
  RankCase c;
  c.r.resize(n);
  c.idx1.resize(n);
  c.idx2.resize(n);
  c.flags.resize(n);
  if (n == 0) {
    return c;
  }
  std::uniform_int_distribution<int32_t> rank_dist(1, static_cast<int32_t>(n));
  std::uniform_int_distribution<int32_t> idx_dist(0,
                                                  static_cast<int32_t>(n - 1));
  std::bernoulli_distribution flag_dist(0.3);
  for (std::size_t i = 0; i < n; ++i) {
    c.r[i] = rank_dist(gen);
    c.idx1[i] = idx_dist(gen);
    c.idx2[i] = idx_dist(gen);
    c.flags[i] = flag_dist(gen) ? 1 : 0;
  }
  return c;
}

}  // namespace

TEST_CASE("integer kernels: avx2 equals scalar exactly") {
  if (!avx2_available()) {
    return;  // nothing to compare on this host
  }
  const KernelFuncs& s = scalar_funcs();
  const KernelFuncs& v = avx2_funcs();
  std::mt19937 gen(12345);

  for (std::size_t n : kSizes) {
    for (int rep = 0; rep < 5; ++rep) {
      RankCase c = make_case(n, gen);
      CHECK(s.sum_min_pairs(c.r.data(), c.idx1.data(), n) ==
            v.sum_min_pairs(c.r.data(), c.idx1.data(), n));
      CHECK(s.sum_abs_diff_pairs(c.r.data(), c.idx1.data(), n) ==
            v.sum_abs_diff_pairs(c.r.data(), c.idx1.data(), n));
      CHECK(s.sum_sq_flagged(c.r.data(), c.flags.data(), n) ==
            v.sum_sq_flagged(c.r.data(), c.flags.data(), n));
      CHECK(s.sum_i32(c.r.data(), n) == v.sum_i32(c.r.data(), n));

      std::vector<int32_t> sorted(c.r);
      std::sort(sorted.begin(), sorted.end());
      CHECK(s.suffix_weighted_sum(sorted.data(), n) ==
            v.suffix_weighted_sum(sorted.data(), n));

      std::vector<int32_t> out_s(n), out_v(n);
      s.gather_min_self(c.r.data(), c.idx1.data(), out_s.data(), n);
      v.gather_min_self(c.r.data(), c.idx1.data(), out_v.data(), n);
      CHECK(out_s == out_v);
      s.gather_min2(c.r.data(), c.idx1.data(), c.idx2.data(), out_s.data(), n);
      v.gather_min2(c.r.data(), c.idx1.data(), c.idx2.data(), out_v.data(), n);
      CHECK(out_s == out_v);
    }
  }
}

TEST_CASE("distance kernel: avx2 equals scalar bitwise") {
  if (!avx2_available()) {
    return;
  }
  const KernelFuncs& s = scalar_funcs();
  const KernelFuncs& v = avx2_funcs();
  std::mt19937 gen(777);
  std::normal_distribution<double> coord(0.0, 3.0);

  for (std::size_t d : {1u, 2u, 3u, 5u}) {
    for (std::size_t n : kSizes) {
      if (n == 0) {
        continue;
      }
      std::vector<std::vector<double>> cols(d, std::vector<double>(n));
      std::vector<const double*> col_ptrs(d);
      for (std::size_t c = 0; c < d; ++c) {
        for (std::size_t j = 0; j < n; ++j) {
          cols[c][j] = coord(gen);
        }
        col_ptrs[c] = cols[c].data();
      }
      std::vector<double> q(d);
      for (std::size_t c = 0; c < d; ++c) {
        q[c] = coord(gen);
      }
      // Query a few subranges so the 4-lane remainder path is exercised.
      for (std::size_t lo : {std::size_t{0}, n / 3}) {
        std::vector<double> out_s(n - lo), out_v(n - lo);
        s.sq_dist_cols(col_ptrs.data(), d, lo, n, q.data(), out_s.data());
        v.sq_dist_cols(col_ptrs.data(), d, lo, n, q.data(), out_v.data());
        for (std::size_t j = 0; j < out_s.size(); ++j) {
          CHECK(out_s[j] == out_v[j]);
        }
      }
    }
  }
}

TEST_CASE("dispatch honors set_backend") {
  set_backend(Backend::scalar);
  CHECK(active_backend() == Backend::scalar);
  if (avx2_available()) {
    set_backend(Backend::avx2);
    CHECK(active_backend() == Backend::avx2);
  }
  set_backend(avx2_available() ? Backend::avx2 : Backend::scalar);
}
