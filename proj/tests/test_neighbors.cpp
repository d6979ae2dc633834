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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "xicor/neighbors.hpp"
#include "xicor/sample.hpp"

namespace {
using namespace xicor;

Sample make1d(const std::vector<double>& x) {
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  for (std::size_t i = 0; i < x.size(); ++i) {
    rows.push_back({x[i]});
    y.push_back(static_cast<double>(i));
  }
  return validate_sample(rows, y);
}

Sample random_sample(int64_t n, int d, std::mt19937& gen) {
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  std::vector<double> x(n * d), y(n);
  for (auto& v : x) {
    v = dist(gen);
  }
  for (auto& v : y) {
    v = dist(gen);
  }
  return validate_sample(std::move(x), std::move(y), d);
}

bool tables_equal(const NeighborTable& a, const NeighborTable& b) {
  return a.k_max == b.k_max && a.n == b.n && a.nbr == b.nbr &&
         a.mutual == b.mutual && a.shared_count == b.shared_count;
}

}  // namespace

TEST_CASE("euclidean table on X = [0, 1, 3]") {
  const Sample s = make1d({0.0, 1.0, 3.0});
  const NeighborTable t = build_nn_table(s, 1);
  // 1-based: N(1)=2, N(2)=1, N(3)=2.
  CHECK(t.neighbor(0, 1) == 1);
  CHECK(t.neighbor(1, 1) == 0);
  CHECK(t.neighbor(2, 1) == 1);
  CHECK(t.mutual == std::vector<uint8_t>{1, 1, 0});
  // Points 1 and 3 share point 2 as their NN; point 2's NN is unshared.
  CHECK(t.shared_count == std::vector<int32_t>{1, 0, 1});
}

TEST_CASE("euclidean distance ties break toward the smaller index") {
  const Sample s = make1d({0.0, 1.0, 1.0});
  const NeighborTable t = build_nn_table(s, 1);
  CHECK(t.neighbor(0, 1) == 1);  // indices 2, 3 tie at distance 1
  // Duplicate covariates are fine for the Euclidean table.
  CHECK(t.neighbor(1, 1) == 2);  // distance 0
  CHECK(t.neighbor(2, 1) == 1);
}

TEST_CASE("euclidean table preconditions") {
  CHECK_THROWS_AS(build_nn_table(make1d({0.0, 1.0}), 3), TooFewPointsError);
  CHECK_THROWS_AS(nn_brute_force_oracle(make1d({0.0}), 1), TooFewPointsError);
}

TEST_CASE("right table on X = [10, 20, 30] with k_max = 3") {
  const Sample s = make1d({10.0, 20.0, 30.0});
  const NeighborTable t = build_right_nn_table(s, 3);
  // 1-based: Nbar_1 = [2,3,3], Nbar_2 = [3,2,3], Nbar_3 = [1,2,3].
  CHECK(t.neighbor(0, 1) == 1);
  CHECK(t.neighbor(1, 1) == 2);
  CHECK(t.neighbor(2, 1) == 2);
  CHECK(t.neighbor(0, 2) == 2);
  CHECK(t.neighbor(1, 2) == 1);
  CHECK(t.neighbor(2, 2) == 2);
  CHECK(t.neighbor(0, 3) == 0);
  CHECK(t.neighbor(1, 3) == 1);
  CHECK(t.neighbor(2, 3) == 2);
}

TEST_CASE("right table under label permutation and singleton") {
  const Sample s = make1d({30.0, 10.0, 20.0});
  const NeighborTable t = build_right_nn_table(s, 1);
  CHECK(t.neighbor(1, 1) == 2);  // Nbar(2) = 3
  CHECK(t.neighbor(2, 1) == 0);  // Nbar(3) = 1
  CHECK(t.neighbor(0, 1) == 0);  // Nbar(1) = 1 (maximum)

  const NeighborTable single = build_right_nn_table(make1d({5.0}), 1);
  CHECK(single.neighbor(0, 1) == 0);
}

TEST_CASE("right table rejects ties and d > 1") {
  CHECK_THROWS_AS(build_right_nn_table(make1d({1.0, 1.0, 2.0}), 1),
                  DuplicateXError);
  std::mt19937 gen(3);
  CHECK_THROWS_AS(build_right_nn_table(random_sample(10, 2, gen), 1),
                  NotUnivariateError);
}

TEST_CASE("right table structure: unique mutual pair, shared only at the top") {
  std::mt19937 gen(11);
  for (int rep = 0; rep < 10; ++rep) {
    const int64_t n = 3 + static_cast<int64_t>(gen() % 200);
    const Sample s = random_sample(n, 1, gen);
    const NeighborTable t = build_right_nn_table(s, 1);
    int64_t mutual_count = 0;
    for (int64_t i = 0; i < n; ++i) {
      mutual_count += t.mutual[i];
    }
    CHECK(mutual_count == 1);
    // shared_count is 0 except for the points with the two largest x.
    std::vector<int64_t> order(n);
    for (int64_t i = 0; i < n; ++i) {
      order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
      return s.x(a, 0) < s.x(b, 0);
    });
    for (int64_t p = 0; p < n; ++p) {
      const bool top_two = p >= n - 2;
      CHECK(t.shared_count[order[p]] == (top_two ? 1 : 0));
    }
  }
}

TEST_CASE("kd-tree equals brute-force oracle on seeded instances") {
  std::mt19937 gen(2024);
  const int dims[] = {1, 2, 3, 5};
  int instances = 0;
  while (instances < 500) {
    const int d = dims[instances % 4];
    const int64_t n = 5 + static_cast<int64_t>(gen() % 496);
    const int k_max = 1 + static_cast<int>(gen() % 3);
    if (n < k_max + 1) {
      continue;
    }
    ++instances;
    const Sample s = random_sample(n, d, gen);
    const NeighborTable fast = build_nn_table(s, k_max);
    const NeighborTable oracle = nn_brute_force_oracle(s, k_max);
    REQUIRE(tables_equal(fast, oracle));
  }
}

TEST_CASE("kd-tree equals oracle on duplicate-heavy data") {
  std::mt19937 gen(99);
  for (int rep = 0; rep < 20; ++rep) {
    const int64_t n = 10 + static_cast<int64_t>(gen() % 100);
    std::vector<double> x(n), y(n);
    for (int64_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(gen() % 5);  // heavy duplication
      y[i] = static_cast<double>(i);
    }
    const Sample s = validate_sample(std::move(x), std::move(y), 1);
    REQUIRE(tables_equal(build_nn_table(s, 2), nn_brute_force_oracle(s, 2)));
  }
}

TEST_CASE("brute-force path above the dimension threshold stays exact") {
  std::mt19937 gen(5);
  const Sample s = random_sample(60, 3, gen);
  NnOptions opts;
  opts.brute_force_dim_threshold = 2;  // force the scan path at d = 3
  const NeighborTable scan = build_nn_table(s, 3, opts);
  const NeighborTable oracle = nn_brute_force_oracle(s, 3);
  CHECK(tables_equal(scan, oracle));
}

TEST_CASE("euclidean table invariant under rigid motions and scaling") {
  std::mt19937 gen(31);
  const Sample s = random_sample(150, 2, gen);
  const NeighborTable base = build_nn_table(s, 3);

  const double angle = 0.83;
  const double c = std::cos(angle), sn = std::sin(angle);
  const double scale = 2.7, tx = 4.2, ty = -1.3;
  std::vector<double> x2(150 * 2);
  for (int64_t i = 0; i < 150; ++i) {
    const double a = s.x(i, 0), b = s.x(i, 1);
    x2[i * 2] = scale * (c * a - sn * b) + tx;
    x2[i * 2 + 1] = scale * (sn * a + c * b) + ty;
  }
  const Sample transformed =
      validate_sample(std::move(x2), s.y_values(), 2);
  CHECK(tables_equal(base, build_nn_table(transformed, 3)));
}

TEST_CASE("right table invariant under strictly increasing transforms") {
  std::mt19937 gen(17);
  const Sample s = random_sample(120, 1, gen);
  std::vector<double> gx(120);
  for (int64_t i = 0; i < 120; ++i) {
    gx[i] = std::atan(s.x(i, 0)) * 3.0 + 11.0;
  }
  const Sample transformed = validate_sample(std::move(gx), s.y_values(), 1);
  CHECK(tables_equal(build_right_nn_table(s, 3),
                     build_right_nn_table(transformed, 3)));
}

TEST_CASE("shared counts respect the kissing-number bound on tie-free data") {
  std::mt19937 gen(53);
  for (int rep = 0; rep < 5; ++rep) {
    const Sample s1 = random_sample(400, 1, gen);
    for (int32_t c : build_nn_table(s1, 1).shared_count) {
      CHECK(c <= 3);
    }
    const Sample s2 = random_sample(400, 2, gen);
    for (int32_t c : build_nn_table(s2, 1).shared_count) {
      CHECK(c <= 6);
    }
  }
}

TEST_CASE("neighbor distances are sorted and never self") {
  std::mt19937 gen(61);
  const Sample s = random_sample(200, 3, gen);
  const NeighborTable t = build_nn_table(s, 3);
  for (int64_t i = 0; i < s.n(); ++i) {
    double prev = -1.0;
    for (int k = 1; k <= 3; ++k) {
      const int32_t j = t.neighbor(i, k);
      CHECK(j != i);
      double dist = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double diff = s.x(j, c) - s.x(i, c);
        dist += diff * diff;
      }
      CHECK(dist >= prev);
      prev = dist;
    }
  }
}
