#pragma once

// Agglomerative hierarchical clustering for the reducible linkages
// (single, complete, average). Merge order is the global greedy order:
// at each step the pair of active clusters with the smallest linkage
// distance merges, ties broken by the lexicographically smallest
// (min node id, max node id). Leaves are nodes 0..n-1; the cluster created
// by merge k is node n+k.

#include <Eigen/Core>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <memory>
#include <new>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "hcmap/distances.hpp"
#include "hcmap/error.hpp"

namespace hcmap {

using NodeId = std::size_t;

enum class Linkage { Single, Complete, Average };

template <typename Scalar>
struct BasicMerge {
  NodeId left;   // smaller operand id
  NodeId right;  // larger operand id
  Scalar height;
  NodeId node;

  friend bool operator==(const BasicMerge&, const BasicMerge&) = default;
};

template <typename Scalar>
struct BasicDendrogram {
  std::size_t n = 0;
  std::vector<BasicMerge<Scalar>> merges;

  NodeId root() const { return 2 * n - 2; }
  std::size_t node_count() const { return 2 * n - 1; }

  /// Throws MalformedDocument when the merge list is not a binary tree over
  /// leaves 0..n-1 with ids assigned in merge order and monotone heights.
  void validate() const {
    auto fail = [](const std::string& why) { throw Error(Errc::MalformedDocument, "dendrogram: " + why); };
    if (n < 1) fail("no leaves");
    if (merges.size() != n - 1) fail("expected " + std::to_string(n - 1) + " merges");
    std::vector<bool> used(2 * n - 1, false);
    for (std::size_t k = 0; k < merges.size(); ++k) {
      const auto& m = merges[k];
      if (m.node != n + k) fail("merge " + std::to_string(k) + " creates node " + std::to_string(m.node));
      if (m.left >= m.node || m.right >= m.node || m.left >= m.right)
        fail("merge " + std::to_string(k) + " has invalid operands");
      if (used[m.left] || used[m.right]) fail("node merged twice at merge " + std::to_string(k));
      used[m.left] = used[m.right] = true;
      if (!(m.height >= Scalar(0))) fail("negative height at merge " + std::to_string(k));
      if (k > 0 && m.height < merges[k - 1].height) fail("heights decrease at merge " + std::to_string(k));
    }
  }

  friend bool operator==(const BasicDendrogram&, const BasicDendrogram&) = default;
};

using Merge = BasicMerge<double>;
using Dendrogram = BasicDendrogram<double>;

namespace detail {

template <typename Scalar>
Scalar lance_williams(Linkage method, Scalar d_xa, Scalar d_xb, std::size_t size_a, std::size_t size_b) {
  switch (method) {
    case Linkage::Single: return std::min(d_xa, d_xb);
    case Linkage::Complete: return std::max(d_xa, d_xb);
    case Linkage::Average:
      return (Scalar(size_a) * d_xa + Scalar(size_b) * d_xb) / Scalar(size_a + size_b);
  }
  return d_xa;
}

}  // namespace detail

/// Clusters a symmetric n x n dissimilarity matrix in O(n^2) memory. Each
/// cluster keeps its nearest neighbour among clusters with a larger node id
/// in a heap keyed (distance, node id). When a neighbour is merged away the
/// stored distance stays as a lower bound on the remaining candidates, and the
/// new cluster replaces it only if strictly closer; otherwise the cluster is
/// rescanned once that bound reaches the top of the heap. Ties
/// go to the lexicographically smallest (smaller id, larger id) pair.
///
/// Working rows are indexed by slot (a merged cluster takes over the row of
/// its right operand) and columns by node id. A pair's current distance is
/// always in the row of its younger node; the columns of new nodes are copied
/// into older rows once a full cache line of them has accumulated.
template <typename Derived>
BasicDendrogram<typename Derived::Scalar> linkage(const Eigen::MatrixBase<Derived>& dissimilarity,
                                                  Linkage method) {
  using Scalar = typename Derived::Scalar;
  const auto n = static_cast<std::size_t>(dissimilarity.rows());
  if (dissimilarity.rows() != dissimilarity.cols())
    throw Error(Errc::NotSquare, "linkage: dissimilarity matrix is not square");
  if (n < 2) throw Error(Errc::TooFewElements, "linkage needs at least 2 elements, got " + std::to_string(n));

  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  constexpr std::size_t line_bytes = 64;
  constexpr std::size_t group = line_bytes >= sizeof(Scalar) ? line_bytes / sizeof(Scalar) : 1;
  const std::size_t nodes = 2 * n - 1;
  const std::size_t ld = (nodes + group - 1) / group * group;

  struct AlignedDelete {
    void operator()(Scalar* p) const { ::operator delete[](p, std::align_val_t{line_bytes}); }
  };
  // Left uninitialized: only entries written below are ever read.
  std::unique_ptr<Scalar[], AlignedDelete> storage(new (std::align_val_t{line_bytes}) Scalar[ld * n]);
  Eigen::Map<Matrix<Scalar>, 0, Eigen::OuterStride<>>(storage.get(), static_cast<Index>(n), static_cast<Index>(n),
                                                      Eigen::OuterStride<>(static_cast<Index>(ld))) = dissimilarity;

  std::vector<std::size_t> slot(nodes, none);
  for (std::size_t i = 0; i < n; ++i) slot[i] = i;
  auto row = [&](NodeId id) { return storage.get() + slot[id] * ld; };

  // Columns below `flushed` are present in every older row.
  std::size_t flushed = n;
  auto value = [&](NodeId i, NodeId j) { return j > i && j >= flushed ? row(j)[i] : row(i)[j]; };

  std::vector<std::size_t> size(nodes, 1);
  std::vector<bool> active(nodes, false);
  std::vector<NodeId> nn(nodes, none);
  std::vector<Scalar> nn_dist(nodes, inf);
  std::vector<bool> stale(nodes, false);  // nn_dist is only a lower bound
  std::vector<std::size_t> version(nodes, 0);
  std::vector<NodeId> live(n);  // ascending; new nodes have the largest id
  for (std::size_t i = 0; i < n; ++i) {
    live[i] = i;
    active[i] = true;
  }

  using Entry = std::tuple<Scalar, NodeId, std::size_t>;  // dist, node id, version
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

  auto rescan = [&](NodeId s) {
    nn[s] = none;
    nn_dist[s] = inf;
    stale[s] = false;
    const Scalar* r = row(s);
    for (auto it = std::upper_bound(live.begin(), live.end(), s); it != live.end(); ++it) {
      const NodeId t = *it;
      const Scalar v = t >= flushed ? row(t)[s] : r[t];
      if (v < nn_dist[s]) {
        nn_dist[s] = v;
        nn[s] = t;
      }
    }
    ++version[s];
    if (nn[s] != none) heap.emplace(nn_dist[s], s, version[s]);
  };
  for (std::size_t s = 0; s < n; ++s) rescan(s);

  BasicDendrogram<Scalar> out;
  out.n = n;
  out.merges.reserve(n - 1);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    NodeId a = none;
    while (!heap.empty()) {
      const auto [dist, id, ver] = heap.top();
      heap.pop();
      if (!active[id] || ver != version[id]) continue;
      if (stale[id]) {
        rescan(id);
        continue;
      }
      a = id;
      break;
    }
    const NodeId b = nn[a];
    const NodeId k = n + step;
    out.merges.push_back({a, b, nn_dist[a], k});

    // k takes over b's row; each entry is read before it is overwritten.
    slot[k] = slot[b];
    Scalar* row_k = row(k);
    for (NodeId x : live) {
      if (x == a || x == b) continue;
      row_k[x] = detail::lance_williams(method, value(a, x), value(b, x), size[a], size[b]);
    }
    active[a] = active[b] = false;
    active[k] = true;
    size[k] = size[a] + size[b];
    std::erase(live, a);
    std::erase(live, b);
    live.push_back(k);

    if ((k + 1) % group == 0) {
      for (NodeId x : live) {
        Scalar* r = row(x);
        for (NodeId j = std::max(flushed, x + 1); j <= k; ++j)
          if (active[j]) r[j] = row(j)[x];
      }
      flushed = k + 1;
    }

    // k has the largest id, so it has no neighbour of its own.
    for (NodeId x : live) {
      if (x == k) continue;
      if (row_k[x] < nn_dist[x]) {
        // strictly below a lower bound: k is the unique nearest
        nn_dist[x] = row_k[x];
        nn[x] = k;
        stale[x] = false;
        ++version[x];
        heap.emplace(nn_dist[x], x, version[x]);
      } else if (nn[x] == a || nn[x] == b) {
        nn[x] = none;
        stale[x] = true;
      }
    }
  }
  return out;
}

template <typename Scalar>
BasicDendrogram<Scalar> linkage(const BasicDistanceMatrix<Scalar>& dmat, Linkage method) {
  return linkage(dmat.d, method);
}

/// Leaf members of every node, indexed by node id.
template <typename Scalar>
std::vector<std::vector<std::size_t>> node_members(const BasicDendrogram<Scalar>& dendro) {
  std::vector<std::vector<std::size_t>> members(dendro.node_count());
  for (std::size_t i = 0; i < dendro.n; ++i) members[i] = {i};
  for (const auto& m : dendro.merges) {
    auto& out = members[m.node];
    out.reserve(members[m.left].size() + members[m.right].size());
    std::merge(members[m.left].begin(), members[m.left].end(), members[m.right].begin(),
               members[m.right].end(), std::back_inserter(out));
  }
  return members;
}

struct CopheneticReport {
  bool structure_valid = true;
  bool monotone = true;
  bool heights_match_linkage = true;
  std::vector<std::string> violations;

  bool ok() const { return structure_valid && monotone && heights_match_linkage; }
};

/// Replays the merges against the dissimilarities and reports whether each
/// height equals the minimum inter-cluster linkage distance among the
/// clusters active at that step, and whether heights are monotone.
template <typename Scalar>
CopheneticReport cophenetic_check(const BasicDendrogram<Scalar>& dendro,
                                  const BasicDistanceMatrix<Scalar>& dmat,
                                  Linkage method = Linkage::Single, Scalar tolerance = Scalar(1e-12)) {
  CopheneticReport report;
  const std::size_t n = dendro.n;
  if (n < 1 || dendro.merges.size() + 1 != n || static_cast<std::size_t>(dmat.size()) != n) {
    report.structure_valid = false;
    report.violations.push_back("merge count or matrix size does not match leaf count");
    return report;
  }
  for (std::size_t k = 1; k < dendro.merges.size(); ++k)
    if (dendro.merges[k].height < dendro.merges[k - 1].height) {
      report.monotone = false;
      report.violations.push_back("height decreases at merge " + std::to_string(k));
    }

  auto cluster_distance = [&](const std::vector<std::size_t>& u, const std::vector<std::size_t>& v) {
    Scalar lo = std::numeric_limits<Scalar>::infinity(), hi = Scalar(0), sum = Scalar(0);
    for (std::size_t i : u)
      for (std::size_t j : v) {
        lo = std::min(lo, dmat.d(i, j));
        hi = std::max(hi, dmat.d(i, j));
        sum += dmat.d(i, j);
      }
    switch (method) {
      case Linkage::Single: return lo;
      case Linkage::Complete: return hi;
      case Linkage::Average: return sum / Scalar(u.size() * v.size());
    }
    return lo;
  };

  std::vector<std::vector<std::size_t>> members(2 * n - 1);
  std::vector<bool> alive(2 * n - 1, false);
  for (std::size_t i = 0; i < n; ++i) {
    members[i] = {i};
    alive[i] = true;
  }
  for (std::size_t k = 0; k < dendro.merges.size(); ++k) {
    const auto& m = dendro.merges[k];
    if (m.node != n + k || m.left >= m.node || m.right >= m.node || !alive[m.left] || !alive[m.right] ||
        m.left == m.right) {
      report.structure_valid = false;
      report.violations.push_back("merge " + std::to_string(k) + " references an inactive node");
      return report;
    }
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (std::size_t u = 0; u < m.node; ++u) {
      if (!alive[u]) continue;
      for (std::size_t v = u + 1; v < m.node; ++v)
        if (alive[v]) best = std::min(best, cluster_distance(members[u], members[v]));
    }
    const Scalar merged = cluster_distance(members[m.left], members[m.right]);
    if (std::abs(m.height - best) > tolerance || std::abs(merged - best) > tolerance) {
      report.heights_match_linkage = false;
      report.violations.push_back("merge " + std::to_string(k) + " height " + std::to_string(m.height) +
                                  " differs from minimum linkage distance " + std::to_string(best));
    }
    std::merge(members[m.left].begin(), members[m.left].end(), members[m.right].begin(),
               members[m.right].end(), std::back_inserter(members[m.node]));
    alive[m.left] = alive[m.right] = false;
    alive[m.node] = true;
  }
  return report;
}

}  // namespace hcmap
