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

#include "xicor/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "xicor/kernels.hpp"

namespace xicor {
namespace {

using int128 = __int128;

// Variance estimators hold every summand as an exact integer; this cap keeps
// the largest accumulator (~2 n^3) inside int64/int128 comfortably and is far
// above the sample sizes the estimators are meant for.
constexpr int64_t kMaxVarianceN = 1'000'000;

double to_double(int128 v) { return static_cast<double>(v); }

void check_table(const NeighborTable& table, const RankVector& ranks,
                 NeighborKind kind, int need_k) {
  if (table.kind != kind) {
    throw OutOfDomainError("neighbor table kind does not match estimator");
  }
  if (table.k_max < need_k) {
    throw OutOfDomainError("neighbor table has k_max = " +
                           std::to_string(table.k_max) + ", need >= " +
                           std::to_string(need_k));
  }
  if (static_cast<std::size_t>(table.n) != ranks.r.size()) {
    throw DimensionMismatchError("table and sample sizes differ");
  }
}

// Shared seven-term core. Per-i coefficients distinguish the two displays:
//   Euclidean: c1 = 1 + M_i, c2 = 2(1 - M_i) + S_i, c3 = 2 - M_i + S_i
//   right:     c1 = 1,       c2 = 2,                c3 = 2
// with M_i the mutual-NN flag and S_i the shared-NN count.
struct SigmaTerms {
  int128 t1 = 0, t2 = 0, t3 = 0;  // 1/n^3 group
  int128 t4 = 0, t5 = 0, t6 = 0;  // 1/(n^2 (n-1)) group
  int64_t msum = 0;               // sum of m_i for the squared-mean term
};

double assemble(const SigmaTerms& t, int64_t n) {
  const double nd = static_cast<double>(n);
  const double n_cubed = nd * nd * nd;
  const double pair_scale = nd * nd * (nd - 1.0);
  const double avg = static_cast<double>(t.msum) / (nd * nd);
  return 36.0 * ((to_double(t.t1) + to_double(t.t2) - to_double(t.t3)) / n_cubed +
                 (4.0 * to_double(t.t4) - 2.0 * to_double(t.t5) +
                  to_double(t.t6)) / pair_scale -
                 4.0 * avg * avg);
}

struct SigmaInputs {
  const int32_t* r;
  const int32_t* n1;
  const int32_t* n2;
  const int32_t* n3;
  const uint8_t* mutual;        // null for the right-NN display
  const int32_t* shared;        // null for the right-NN display
  int64_t n;
};

SigmaTerms sigma_terms_naive(const SigmaInputs& in) {
  const int64_t n = in.n;
  std::vector<int32_t> m(n), w(n);
  SigmaTerms t;
  for (int64_t i = 0; i < n; ++i) {
    const int32_t mi = std::min(in.r[i], in.r[in.n1[i]]);
    const int32_t ai = std::min(in.r[i], in.r[in.n2[i]]);
    const int32_t bi = std::min(in.r[in.n2[i]], in.r[in.n3[i]]);
    int64_t c1 = 1, c2 = 2, c3 = 2;
    if (in.mutual != nullptr) {
      const int64_t mut = in.mutual[i];
      c1 = 1 + mut;
      c2 = 2 * (1 - mut) + in.shared[i];
      c3 = 2 - mut + in.shared[i];
    }
    t.t1 += static_cast<int128>(mi) * mi * c1;
    t.t2 += static_cast<int128>(mi) * ai * c2;
    t.t3 += static_cast<int128>(mi) * bi * c3;
    m[i] = mi;
    w[i] = std::min(in.r[in.n1[i]], in.r[in.n2[i]]);
    t.msum += mi;
  }
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      if (j == i) {
        continue;
      }
      if (in.r[i] <= m[j]) {
        t.t4 += m[i];
        t.t5 += w[i];
      }
      t.t6 += std::min(m[i], m[j]);
    }
  }
  return t;
}

SigmaTerms sigma_terms_optimized(const SigmaInputs& in) {
  const int64_t n = in.n;
  const auto& k = kernels::active();
  std::vector<int32_t> m(n), a(n), b(n), w(n);
  k.gather_min_self(in.r, in.n1, m.data(), n);
  k.gather_min_self(in.r, in.n2, a.data(), n);
  k.gather_min2(in.r, in.n2, in.n3, b.data(), n);
  k.gather_min2(in.r, in.n1, in.n2, w.data(), n);

  SigmaTerms t;
  if (in.mutual != nullptr) {
    t.t1 = k.sum_sq_flagged(m.data(), in.mutual, n);
    for (int64_t i = 0; i < n; ++i) {
      const int64_t mut = in.mutual[i];
      t.t2 += static_cast<int128>(m[i]) * a[i] *
              (2 * (1 - mut) + in.shared[i]);
      t.t3 += static_cast<int128>(m[i]) * b[i] * (2 - mut + in.shared[i]);
    }
  } else {
    std::vector<uint8_t> zeros(n, 0);
    t.t1 = k.sum_sq_flagged(m.data(), zeros.data(), n);
    for (int64_t i = 0; i < n; ++i) {
      t.t2 += static_cast<int128>(m[i]) * a[i] * 2;
      t.t3 += static_cast<int128>(m[i]) * b[i] * 2;
    }
  }

  // Pair sums. With m_sorted ascending, #{j : m_j >= v} falls out of one
  // binary search, and the j = i exclusion is analytic: m_i >= R_i holds
  // exactly when R_i <= R_N(i) because m_i = min(R_i, R_N(i)) <= R_i.
  std::vector<int32_t> m_sorted(m);
  std::sort(m_sorted.begin(), m_sorted.end());
  for (int64_t i = 0; i < n; ++i) {
    const int64_t ge =
        n - (std::lower_bound(m_sorted.begin(), m_sorted.end(), in.r[i]) -
             m_sorted.begin());
    const int64_t cnt = ge - (in.r[i] <= in.r[in.n1[i]] ? 1 : 0);
    t.t4 += static_cast<int128>(m[i]) * cnt;
    t.t5 += static_cast<int128>(w[i]) * cnt;
  }
  t.t6 = static_cast<int128>(k.suffix_weighted_sum(m_sorted.data(), n)) * 2;
  t.msum = k.sum_i32(m.data(), n);
  return t;
}

double sigma_core(const RankVector& ranks, const NeighborTable& table,
                  Mode mode, bool euclidean_display) {
  const int64_t n = table.n;
  if (n > kMaxVarianceN) {
    throw OutOfDomainError("variance estimator supports n <= 1e6");
  }
  SigmaInputs in;
  in.r = ranks.r.data();
  in.n1 = table.column(1);
  in.n2 = table.column(2);
  in.n3 = table.column(3);
  in.mutual = euclidean_display ? table.mutual.data() : nullptr;
  in.shared = euclidean_display ? table.shared_count.data() : nullptr;
  in.n = n;
  const SigmaTerms t =
      mode == Mode::naive ? sigma_terms_naive(in) : sigma_terms_optimized(in);
  return assemble(t, n);
}

}  // namespace

double EstimateReport::standard_error() const {
  return std::sqrt(variance_for_inference() / static_cast<double>(n));
}

double xi_n(const RankVector& ranks, const NeighborTable& table) {
  check_table(table, ranks, NeighborKind::euclidean, 1);
  const int64_t n = table.n;
  if (n < 2) {
    throw TooFewPointsError("xi_n needs n >= 2");
  }
  const int64_t sum =
      kernels::active().sum_min_pairs(ranks.r.data(), table.column(1), n);
  const double nd = static_cast<double>(n);
  return 6.0 * static_cast<double>(sum) / (nd * nd - 1.0) -
         (2.0 * nd + 1.0) / (nd - 1.0);
}

double xi_n(const Sample& sample, const NeighborTable& table) {
  return xi_n(compute_ranks(sample), table);
}

double xi_bar_n(const RankVector& ranks, const NeighborTable& table) {
  check_table(table, ranks, NeighborKind::right, 1);
  const int64_t n = table.n;
  if (n < 2) {
    throw TooFewPointsError("xi_bar_n needs n >= 2");
  }
  const int64_t sum =
      kernels::active().sum_abs_diff_pairs(ranks.r.data(), table.column(1), n);
  const double nd = static_cast<double>(n);
  return 1.0 - 3.0 * static_cast<double>(sum) / (nd * nd - 1.0);
}

double xi_bar_n(const Sample& sample, const NeighborTable& table) {
  return xi_bar_n(compute_ranks(sample), table);
}

double sigma_hat_sq(const RankVector& ranks, const NeighborTable& table,
                    Mode mode) {
  check_table(table, ranks, NeighborKind::euclidean, 3);
  if (table.n < 4) {
    throw TooFewPointsError("sigma_hat_sq needs n >= 4");
  }
  return sigma_core(ranks, table, mode, /*euclidean_display=*/true);
}

double sigma_hat_sq(const Sample& sample, const NeighborTable& table,
                    Mode mode) {
  return sigma_hat_sq(compute_ranks(sample), table, mode);
}

double sigma_bar_hat_sq(const RankVector& ranks, const NeighborTable& table,
                        Mode mode) {
  check_table(table, ranks, NeighborKind::right, 3);
  if (table.n < 2) {
    throw TooFewPointsError("sigma_bar_hat_sq needs n >= 2");
  }
  return sigma_core(ranks, table, mode, /*euclidean_display=*/false);
}

double sigma_bar_hat_sq(const Sample& sample, const NeighborTable& table,
                        Mode mode) {
  return sigma_bar_hat_sq(compute_ranks(sample), table, mode);
}

EstimateReport estimate(const Sample& sample, EstimatorKind kind, Mode mode,
                        bool with_variance) {
  EstimateReport rep;
  rep.n = sample.n();
  rep.d = sample.d();
  rep.kind = kind;
  rep.mode = mode;
  rep.ties_flag = sample.has_y_ties();

  const RankVector ranks = compute_ranks(sample);
  // The coefficient exists from n = 2 on, the variance estimators need more
  // points (third NN); report the coefficient alone below those sizes.
  if (kind == EstimatorKind::nn && sample.n() < 4) {
    with_variance = false;
  }
  if (kind == EstimatorKind::right_nn) {
    if (sample.d() != 1) {
      throw NotUnivariateError("right-NN estimator requires d = 1");
    }
    const NeighborTable table =
        build_right_nn_table(sample, with_variance ? 3 : 1);
    rep.coefficient = xi_bar_n(ranks, table);
    if (with_variance) {
      rep.variance_est = sigma_bar_hat_sq(ranks, table, mode);
    }
  } else {
    const NeighborTable table = build_nn_table(sample, with_variance ? 3 : 1);
    rep.coefficient = xi_n(ranks, table);
    if (with_variance) {
      rep.variance_est = sigma_hat_sq(ranks, table, mode);
    }
  }
  if (rep.variance_est.has_value() && *rep.variance_est < 0.0) {
    rep.variance_clamped = true;
  }
  return rep;
}

}  // namespace xicor
