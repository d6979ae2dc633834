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

#include "xicor/sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace xicor {

Sample validate_sample(std::vector<double> x_flat, std::vector<double> y,
                       int d) {
  if (d < 1) {
    throw DimensionMismatchError("covariate dimension must be >= 1");
  }
  const int64_t n = static_cast<int64_t>(y.size());
  if (n == 0) {
    throw EmptySampleError("sample contains no observations");
  }
  if (x_flat.size() != static_cast<std::size_t>(n) * d) {
    throw DimensionMismatchError(
        "x has " + std::to_string(x_flat.size()) + " values, expected " +
        std::to_string(n) + " rows of dimension " + std::to_string(d));
  }
  for (double v : x_flat) {
    if (!std::isfinite(v)) {
      throw NonFiniteValueError("non-finite covariate value");
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) {
      throw NonFiniteValueError("non-finite response value");
    }
  }

  Sample s;
  s.n_ = n;
  s.d_ = d;
  s.x_ = std::move(x_flat);
  s.y_ = std::move(y);

  // Tie scan on y.
  {
    std::vector<double> sorted(s.y_);
    std::sort(sorted.begin(), sorted.end());
    s.y_ties_ = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
  }
  // Duplicate-row scan on x (lexicographic sort of row indices).
  {
    std::vector<int64_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto row_less = [&](int64_t a, int64_t b) {
      return std::lexicographical_compare(
          s.x_.begin() + a * d, s.x_.begin() + (a + 1) * d,
          s.x_.begin() + b * d, s.x_.begin() + (b + 1) * d);
    };
    std::sort(order.begin(), order.end(), row_less);
    for (int64_t i = 0; i + 1 < n; ++i) {
      if (std::equal(s.x_.begin() + order[i] * d,
                     s.x_.begin() + (order[i] + 1) * d,
                     s.x_.begin() + order[i + 1] * d)) {
        s.x_dups_ = true;
        break;
      }
    }
  }
  return s;
}

Sample validate_sample(const std::vector<std::vector<double>>& x_rows,
                       const std::vector<double>& y) {
  if (x_rows.size() != y.size()) {
    throw DimensionMismatchError("x and y row counts differ");
  }
  if (x_rows.empty()) {
    throw EmptySampleError("sample contains no observations");
  }
  const std::size_t d = x_rows.front().size();
  if (d == 0) {
    throw DimensionMismatchError("covariate dimension must be >= 1");
  }
  std::vector<double> flat;
  flat.reserve(x_rows.size() * d);
  for (const auto& row : x_rows) {
    if (row.size() != d) {
      throw DimensionMismatchError("ragged covariate rows");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return validate_sample(std::move(flat), y, static_cast<int>(d));
}

RankVector compute_ranks(const Sample& sample) {
  const int64_t n = sample.n();
  std::vector<int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& y = sample.y_values();
  std::sort(order.begin(), order.end(),
            [&](int32_t a, int32_t b) { return y[a] < y[b]; });

  RankVector out;
  out.r.resize(n);
  // Max rank within each tied run: every element of the run gets the run's
  // end position (1-based).
  int64_t i = 0;
  while (i < n) {
    int64_t j = i + 1;
    while (j < n && y[order[j]] == y[order[i]]) {
      ++j;
    }
    for (int64_t k = i; k < j; ++k) {
      out.r[order[k]] = static_cast<int32_t>(j);
    }
    i = j;
  }
  return out;
}

RankVector compute_ranks_counting(const Sample& sample) {
  const int64_t n = sample.n();
  const auto& y = sample.y_values();
  RankVector out;
  out.r.resize(n);
  for (int64_t i = 0; i < n; ++i) {
    int32_t c = 0;
    for (int64_t j = 0; j < n; ++j) {
      c += y[j] <= y[i] ? 1 : 0;
    }
    out.r[i] = c;
  }
  return out;
}

}  // namespace xicor
