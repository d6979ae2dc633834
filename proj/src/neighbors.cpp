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

#include "xicor/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "xicor/kernels.hpp"

namespace xicor {
namespace {

using Candidate = std::pair<double, int32_t>;  // (squared distance, index)

// Fixed-capacity max-heap of the k best (dist^2, index) candidates under
// lexicographic order, so distance ties resolve toward the smaller index.
class KBest {
 public:
  explicit KBest(int k) : k_(static_cast<std::size_t>(k)) { heap_.reserve(k_); }

  bool full() const { return heap_.size() == k_; }
  double worst_dist() const { return heap_.front().first; }

  void offer(Candidate c) {
    if (heap_.size() < k_) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end());
    } else if (c < heap_.front()) {
      std::pop_heap(heap_.begin(), heap_.end());
      heap_.back() = c;
      std::push_heap(heap_.begin(), heap_.end());
    }
  }

  // Ascending (dist^2, index).
  std::vector<Candidate> sorted() {
    std::vector<Candidate> out = heap_;
    std::sort(out.begin(), out.end());
    return out;
  }

  void reset() { heap_.clear(); }

 private:
  std::size_t k_;
  std::vector<Candidate> heap_;
};

// kd-tree over a column-major copy of the points; leaves are contiguous
// position ranges so the distance kernel can scan them.
class KdTree {
 public:
  KdTree(const Sample& sample, int leaf_size = 16)
      : d_(sample.d()), n_(sample.n()), leaf_size_(leaf_size) {
    soa_.resize(static_cast<std::size_t>(d_) * n_);
    orig_.resize(n_);
    std::iota(orig_.begin(), orig_.end(), 0);

    // Build on a scratch row-major copy, then transpose the final point
    // order into the column-major buffer.
    rows_ = &sample.x_flat();
    nodes_.reserve(static_cast<std::size_t>(2 * n_ / leaf_size_ + 4));
    root_ = build(0, n_);
    for (int c = 0; c < d_; ++c) {
      double* col = soa_.data() + static_cast<int64_t>(c) * n_;
      for (int64_t p = 0; p < n_; ++p) {
        col[p] = (*rows_)[static_cast<int64_t>(orig_[p]) * d_ + c];
      }
    }
    cols_.resize(d_);
    for (int c = 0; c < d_; ++c) {
      cols_[c] = soa_.data() + static_cast<int64_t>(c) * n_;
    }
  }

  void knn(const double* q, int32_t self, KBest& best,
           std::vector<double>& off, std::vector<double>& dist_buf) const {
    std::fill(off.begin(), off.end(), 0.0);
    search(root_, q, self, 0.0, off, dist_buf, best);
  }

 private:
  struct Node {
    double split = 0.0;
    int32_t dim = -1;  // -1 marks a leaf
    int32_t left = -1, right = -1;
    int32_t lo = 0, hi = 0;
  };

  int32_t build(int64_t lo, int64_t hi) {
    Node node;
    node.lo = static_cast<int32_t>(lo);
    node.hi = static_cast<int32_t>(hi);
    if (hi - lo <= leaf_size_) {
      nodes_.push_back(node);
      return static_cast<int32_t>(nodes_.size() - 1);
    }

    // Split the widest dimension at its median point.
    int best_dim = 0;
    double best_spread = -1.0;
    for (int c = 0; c < d_; ++c) {
      double mn = coord(orig_[lo], c), mx = mn;
      for (int64_t p = lo + 1; p < hi; ++p) {
        double v = coord(orig_[p], c);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
      if (mx - mn > best_spread) {
        best_spread = mx - mn;
        best_dim = c;
      }
    }
    if (best_spread == 0.0) {
      // All points in this range are identical; keep them as one leaf.
      nodes_.push_back(node);
      return static_cast<int32_t>(nodes_.size() - 1);
    }

    const int64_t mid = lo + (hi - lo) / 2;
    std::nth_element(orig_.begin() + lo, orig_.begin() + mid,
                     orig_.begin() + hi, [&](int32_t a, int32_t b) {
                       return coord(a, best_dim) < coord(b, best_dim);
                     });
    node.dim = best_dim;
    node.split = coord(orig_[mid], best_dim);
    const int32_t id = static_cast<int32_t>(nodes_.size());
    nodes_.push_back(node);
    const int32_t left = build(lo, mid);
    const int32_t right = build(mid, hi);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  double coord(int32_t orig_index, int c) const {
    return (*rows_)[static_cast<int64_t>(orig_index) * d_ + c];
  }

  void scan_leaf(const Node& node, const double* q, int32_t self,
                 std::vector<double>& dist_buf, KBest& best) const {
    const std::size_t lo = node.lo, hi = node.hi;
    if (dist_buf.size() < hi - lo) {
      dist_buf.resize(hi - lo);  // duplicate-heavy data can grow a leaf
    }
    kernels::active().sq_dist_cols(cols_.data(), d_, lo, hi, q,
                                   dist_buf.data());
    for (std::size_t p = lo; p < hi; ++p) {
      const int32_t j = orig_[p];
      if (j == self) {
        continue;
      }
      best.offer({dist_buf[p - lo], j});
    }
  }

  // rd is the squared distance from q to the node's half-space region,
  // maintained incrementally through off[]. Descend the far side whenever
  // rd <= worst: equal-distance candidates must stay reachable so index
  // tie-breaks match the brute-force oracle.
  void search(int32_t node_id, const double* q, int32_t self, double rd,
              std::vector<double>& off, std::vector<double>& dist_buf,
              KBest& best) const {
    const Node& node = nodes_[node_id];
    if (node.dim < 0) {
      scan_leaf(node, q, self, dist_buf, best);
      return;
    }
    const int c = node.dim;
    const double diff = q[c] - node.split;
    const int32_t near = diff < 0.0 ? node.left : node.right;
    const int32_t far = diff < 0.0 ? node.right : node.left;

    search(near, q, self, rd, off, dist_buf, best);

    const double old_off = off[c];
    const double new_rd = rd - old_off * old_off + diff * diff;
    if (!best.full() || new_rd <= best.worst_dist()) {
      off[c] = diff;
      search(far, q, self, new_rd, off, dist_buf, best);
      off[c] = old_off;
    }
  }

  int d_;
  int64_t n_;
  int leaf_size_;
  const std::vector<double>* rows_;
  std::vector<double> soa_;
  std::vector<const double*> cols_;
  std::vector<int32_t> orig_;
  std::vector<Node> nodes_;
  int32_t root_ = 0;
};

void fill_mutual_and_shared(NeighborTable& table) {
  const int64_t n = table.n;
  const int32_t* first = table.column(1);
  table.mutual.assign(n, 0);
  table.shared_count.assign(n, 0);
  std::vector<int32_t> hits(n, 0);
  for (int64_t i = 0; i < n; ++i) {
    hits[first[i]] += 1;
  }
  for (int64_t i = 0; i < n; ++i) {
    table.mutual[i] = first[first[i]] == i ? 1 : 0;
    // {j : N(j) = N(i)} always contains i itself; drop that self match.
    table.shared_count[i] = hits[first[i]] - 1;
  }
}

void require_univariate(const Sample& sample) {
  if (sample.d() != 1) {
    throw NotUnivariateError("right nearest neighbors require d = 1, got d = " +
                             std::to_string(sample.d()));
  }
}

}  // namespace

NeighborTable build_nn_table(const Sample& sample, int k_max,
                             const NnOptions& opts) {
  const int64_t n = sample.n();
  if (k_max < 1) {
    throw OutOfDomainError("k_max must be >= 1");
  }
  if (n < k_max + 1) {
    throw TooFewPointsError("need n >= k_max + 1 = " +
                            std::to_string(k_max + 1) + ", got n = " +
                            std::to_string(n));
  }

  NeighborTable table;
  table.kind = NeighborKind::euclidean;
  table.k_max = k_max;
  table.n = n;
  table.nbr.resize(static_cast<std::size_t>(k_max) * n);

  const int d = sample.d();
  if (d <= opts.brute_force_dim_threshold) {
    KdTree tree(sample);
    KBest best(k_max);
    std::vector<double> off(d, 0.0);
    std::vector<double> dist_buf(64);
    for (int64_t i = 0; i < n; ++i) {
      best.reset();
      tree.knn(sample.x_flat().data() + i * d, static_cast<int32_t>(i), best,
               off, dist_buf);
      const auto hits = best.sorted();
      for (int k = 0; k < k_max; ++k) {
        table.nbr[static_cast<int64_t>(k) * n + i] = hits[k].second;
      }
    }
  } else {
    // Straight scan; still exact and tie-broken by index.
    for (int64_t i = 0; i < n; ++i) {
      KBest best(k_max);
      const double* qi = sample.x_flat().data() + i * d;
      for (int64_t j = 0; j < n; ++j) {
        if (j == i) {
          continue;
        }
        const double* qj = sample.x_flat().data() + j * d;
        double s = 0.0;
        for (int c = 0; c < d; ++c) {
          double t = qj[c] - qi[c];
          s += t * t;
        }
        best.offer({s, static_cast<int32_t>(j)});
      }
      const auto hits = best.sorted();
      for (int k = 0; k < k_max; ++k) {
        table.nbr[static_cast<int64_t>(k) * n + i] = hits[k].second;
      }
    }
  }

  fill_mutual_and_shared(table);
  return table;
}

NeighborTable build_right_nn_table(const Sample& sample, int k_max) {
  require_univariate(sample);
  const int64_t n = sample.n();
  if (k_max < 1) {
    throw OutOfDomainError("k_max must be >= 1");
  }
  if (n < 1) {
    throw TooFewPointsError("empty sample");
  }

  std::vector<int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& x = sample.x_flat();
  std::sort(order.begin(), order.end(),
            [&](int32_t a, int32_t b) { return x[a] < x[b]; });
  for (int64_t p = 0; p + 1 < n; ++p) {
    if (x[order[p]] == x[order[p + 1]]) {
      throw DuplicateXError("tied covariate values; right neighbor order "
                            "undefined");
    }
  }

  NeighborTable table;
  table.kind = NeighborKind::right;
  table.k_max = k_max;
  table.n = n;
  table.nbr.resize(static_cast<std::size_t>(k_max) * n);
  for (int k = 1; k <= k_max; ++k) {
    int32_t* col = table.nbr.data() + static_cast<int64_t>(k - 1) * n;
    for (int64_t p = 0; p < n; ++p) {
      const int32_t i = order[p];
      col[i] = p + k < n ? order[p + k] : i;
    }
  }
  fill_mutual_and_shared(table);
  return table;
}

NeighborTable nn_brute_force_oracle(const Sample& sample, int k_max) {
  const int64_t n = sample.n();
  if (k_max < 1) {
    throw OutOfDomainError("k_max must be >= 1");
  }
  if (n < k_max + 1) {
    throw TooFewPointsError("need n >= k_max + 1 = " +
                            std::to_string(k_max + 1) + ", got n = " +
                            std::to_string(n));
  }
  const int d = sample.d();

  NeighborTable table;
  table.kind = NeighborKind::euclidean;
  table.k_max = k_max;
  table.n = n;
  table.nbr.resize(static_cast<std::size_t>(k_max) * n);

  std::vector<Candidate> all;
  all.reserve(n - 1);
  for (int64_t i = 0; i < n; ++i) {
    all.clear();
    for (int64_t j = 0; j < n; ++j) {
      if (j == i) {
        continue;
      }
      double s = 0.0;
      for (int c = 0; c < d; ++c) {
        double t = sample.x(j, c) - sample.x(i, c);
        s += t * t;
      }
      all.push_back({s, static_cast<int32_t>(j)});
    }
    std::sort(all.begin(), all.end());
    for (int k = 0; k < k_max; ++k) {
      table.nbr[static_cast<int64_t>(k) * n + i] = all[k].second;
    }
  }
  fill_mutual_and_shared(table);
  return table;
}

}  // namespace xicor
