#pragma once

// Slow, obviously-correct reference implementations used to check the
// library. None of them call into the code under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "hcmap/linkage.hpp"
#include "hcmap/layout.hpp"

namespace oracle {

using hcmap::Linkage;

struct Merge {
  std::size_t left, right;
  double height;
};

// Rescans every pair of active clusters at every step and evaluates the
// linkage directly from member-to-member distances. Ties go to the
// lexicographically smallest (smaller id, larger id) pair.
template <typename MatrixT>
std::vector<Merge> naive_linkage(const MatrixT& d, Linkage method) {
  const std::size_t n = static_cast<std::size_t>(d.rows());
  std::vector<std::size_t> ids(n);
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = i;
    members[i] = {i};
  }
  auto between = [&](const std::vector<std::size_t>& u, const std::vector<std::size_t>& v) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0, sum = 0;
    for (std::size_t i : u)
      for (std::size_t j : v) {
        const double v = d(i, j);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
      }
    if (method == Linkage::Single) return lo;
    if (method == Linkage::Complete) return hi;
    return sum / static_cast<double>(u.size() * v.size());
  };

  std::vector<Merge> out;
  std::size_t next = n;
  while (ids.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> key{SIZE_MAX, SIZE_MAX};
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        const double h = between(members[i], members[j]);
        const std::pair<std::size_t, std::size_t> k{std::min(ids[i], ids[j]), std::max(ids[i], ids[j])};
        if (h < best || (h == best && k < key)) {
          best = h;
          key = k;
          bi = i;
          bj = j;
        }
      }
    out.push_back({key.first, key.second, best});
    std::vector<std::size_t> merged = members[bi];
    merged.insert(merged.end(), members[bj].begin(), members[bj].end());
    ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(bj));
    members.erase(members.begin() + static_cast<std::ptrdiff_t>(bj));
    ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(bi));
    members.erase(members.begin() + static_cast<std::ptrdiff_t>(bi));
    ids.push_back(next++);
    members.push_back(std::move(merged));
  }
  return out;
}

// Kruskal with a plain union-find; returns MST edge weights in ascending order.
template <typename MatrixT>
std::vector<double> mst_weights(const MatrixT& d) {
  const std::size_t n = static_cast<std::size_t>(d.rows());
  struct Edge {
    double w;
    std::size_t i, j;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({d(i, j), i, j});
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.w < b.w; });
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<double> out;
  for (const auto& e : edges) {
    const std::size_t a = find(e.i), b = find(e.j);
    if (a == b) continue;
    parent[a] = b;
    out.push_back(e.w);
  }
  return out;
}

// Pair-confusion form of the adjusted Rand index over all C(n, 2) pairs.
inline double ari_pairs(const std::vector<std::size_t>& p, const std::vector<std::size_t>& q) {
  double a = 0, b = 0, c = 0, dd = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const bool sp = p[i] == p[j], sq = q[i] == q[j];
      if (sp && sq) ++a;
      else if (sp) ++b;
      else if (sq) ++c;
      else ++dd;
    }
  const double den = (a + b) * (b + dd) + (a + c) * (c + dd);
  if (den == 0) return 1.0;
  return 2.0 * (a * dd - b * c) / den;
}

// O(E^2) crossing count: two edges of the same gap cross when their
// endpoints are in opposite orders.
inline std::size_t crossings_quadratic(const hcmap::Ordering& order, const std::vector<hcmap::LayerEdge>& edges) {
  std::vector<std::vector<std::size_t>> pos(order.size());
  for (std::size_t l = 0; l < order.size(); ++l) {
    pos[l].resize(order[l].size());
    for (std::size_t p = 0; p < order[l].size(); ++p) pos[l][order[l][p]] = p;
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < edges.size(); ++i)
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      const auto& e = edges[i];
      const auto& f = edges[j];
      if (e.layer != f.layer) continue;
      const auto du = static_cast<long>(pos[e.layer][e.from]) - static_cast<long>(pos[f.layer][f.from]);
      const auto dv = static_cast<long>(pos[e.layer + 1][e.to]) - static_cast<long>(pos[f.layer + 1][f.to]);
      if (du * dv < 0) ++count;
    }
  return count;
}

// Exact two-layer crossing minimum: every permutation of the top layer, and
// for each an optimal bottom order by dynamic programming over subsets.
inline std::size_t optimal_two_layer_crossings(std::size_t top, std::size_t bottom,
                                               const std::vector<hcmap::LayerEdge>& edges) {
  std::vector<std::size_t> perm(top);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = SIZE_MAX;
  const std::size_t full = (std::size_t{1} << bottom) - 1;
  std::vector<std::size_t> dp(full + 1);
  std::vector<std::vector<std::size_t>> cost(bottom, std::vector<std::size_t>(bottom));
  std::vector<std::size_t> rank(top);
  do {
    for (std::size_t p = 0; p < top; ++p) rank[perm[p]] = p;
    // cost[u][v]: crossings between edges into u and edges into v when u precedes v
    for (auto& row : cost) std::fill(row.begin(), row.end(), 0);
    for (const auto& e : edges)
      for (const auto& f : edges)
        if (e.to != f.to && rank[e.from] > rank[f.from]) ++cost[e.to][f.to];
    std::fill(dp.begin(), dp.end(), SIZE_MAX);
    dp[0] = 0;
    for (std::size_t s = 1; s <= full; ++s)
      for (std::size_t v = 0; v < bottom; ++v) {
        if (!(s >> v & 1)) continue;
        const std::size_t rest = s & ~(std::size_t{1} << v);
        if (dp[rest] == SIZE_MAX) continue;
        std::size_t add = 0;
        for (std::size_t u = 0; u < bottom; ++u)
          if (rest >> u & 1) add += cost[u][v];
        dp[s] = std::min(dp[s], dp[rest] + add);
      }
    best = std::min(best, dp[full]);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Membership vector of the partition obtained by replaying the first
// n - 1 - depth merges, with labels renumbered by smallest member.
template <typename Scalar>
std::vector<std::size_t> replay_cut(const hcmap::BasicDendrogram<Scalar>& dendro, std::size_t depth) {
  const std::size_t n = dendro.n;
  std::vector<std::size_t> label(n);
  std::iota(label.begin(), label.end(), 0);
  std::vector<std::size_t> node_of_leaf(n);
  std::iota(node_of_leaf.begin(), node_of_leaf.end(), 0);
  const std::size_t applied = n - 1 - depth;
  for (std::size_t k = 0; k < applied; ++k) {
    const auto& m = dendro.merges[k];
    for (std::size_t i = 0; i < n; ++i)
      if (node_of_leaf[i] == m.left || node_of_leaf[i] == m.right) node_of_leaf[i] = m.node;
  }
  std::vector<std::size_t> first(2 * n, SIZE_MAX);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (first[node_of_leaf[i]] == SIZE_MAX) first[node_of_leaf[i]] = next++;
    label[i] = first[node_of_leaf[i]];
  }
  return label;
}

}  // namespace oracle
