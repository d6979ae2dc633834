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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "xicor/sample.hpp"

namespace {
using namespace xicor;

Sample make1d(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::vector<double>> rows;
  rows.reserve(x.size());
  for (double v : x) {
    rows.push_back({v});
  }
  return validate_sample(rows, y);
}
}  // namespace

TEST_CASE("validate_sample accepts well-formed input") {
  const Sample s = validate_sample({{0.1}, {0.2}}, {1.0, 2.0});
  CHECK(s.n() == 2);
  CHECK(s.d() == 1);
  CHECK_FALSE(s.has_y_ties());
}

TEST_CASE("validate_sample rejects bad input") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(validate_sample({{0.1}, {nan}}, {1.0, 2.0}),
                  NonFiniteValueError);
  CHECK_THROWS_AS(validate_sample({{0.1}, {0.2}}, {1.0, inf}),
                  NonFiniteValueError);
  CHECK_THROWS_AS(validate_sample(std::vector<std::vector<double>>{},
                                  std::vector<double>{}),
                  EmptySampleError);
  CHECK_THROWS_AS(validate_sample({{1.0, 2.0}, {3.0}}, {1.0, 2.0}),
                  DimensionMismatchError);
  CHECK_THROWS_AS(validate_sample({{1.0}, {2.0}}, {1.0}),
                  DimensionMismatchError);
}

TEST_CASE("tie and duplicate flags") {
  const Sample tied = validate_sample({{1.0}, {2.0}, {3.0}}, {5.0, 5.0, 1.0});
  CHECK(tied.has_y_ties());
  CHECK_FALSE(tied.has_duplicate_x());
  const Sample dup = validate_sample({{1.0}, {1.0}, {3.0}}, {5.0, 4.0, 1.0});
  CHECK(dup.has_duplicate_x());
  CHECK_FALSE(dup.has_y_ties());
}

TEST_CASE("compute_ranks on hand cases") {
  CHECK(compute_ranks(make1d({1, 2, 3}, {0.3, 0.1, 0.2})).r ==
        std::vector<int32_t>{3, 1, 2});
  CHECK(compute_ranks(make1d({1}, {5.0})).r == std::vector<int32_t>{1});
  // Max-rank convention under ties.
  CHECK(compute_ranks(make1d({1, 2, 3}, {2, 2, 1})).r ==
        std::vector<int32_t>{3, 3, 1});
}

TEST_CASE("ranks depend only on order") {
  std::mt19937 gen(42);
  std::normal_distribution<double> dist;
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 1 + static_cast<int>(gen() % 300);
    std::vector<double> x(n), y(n), gy(n);
    for (int i = 0; i < n; ++i) {
      x[i] = i;
      y[i] = dist(gen);
      gy[i] = std::exp(y[i]) + 3.0;  // strictly increasing transform
    }
    CHECK(compute_ranks(make1d(x, y)).r == compute_ranks(make1d(x, gy)).r);
  }
}

TEST_CASE("sorting ranks equal counting oracle, with and without ties") {
  std::mt19937 gen(7);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 1 + static_cast<int>(gen() % 250);
    std::vector<double> x(n), y(n);
    const bool with_ties = rep % 2 == 0;
    for (int i = 0; i < n; ++i) {
      x[i] = i;
      y[i] = with_ties ? static_cast<double>(gen() % 17)
                       : std::uniform_real_distribution<double>()(gen);
    }
    const Sample s = make1d(x, y);
    CHECK(compute_ranks(s).r == compute_ranks_counting(s).r);
  }
}
