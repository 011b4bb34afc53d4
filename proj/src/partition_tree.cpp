#include "hcmap/partition_tree.hpp"

#include <algorithm>
#include <string>

namespace hcmap {

std::size_t Partition::element_count() const {
  std::size_t total = 0;
  for (const auto& c : clusters) total += c.size();
  return total;
}

std::vector<std::size_t> Partition::membership() const {
  const std::size_t n = element_count();
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> of(n, unset);
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    if (clusters[k].members.empty()) throw Error(Errc::ElementSetMismatch, "partition has an empty cluster");
    for (std::size_t e : clusters[k].members) {
      if (e >= n || of[e] != unset)
        throw Error(Errc::ElementSetMismatch,
                    "partition does not cover 0.." + std::to_string(n - 1) + " exactly once");
      of[e] = k;
    }
  }
  return of;
}

PartitionTree::PartitionTree(std::size_t n, std::span<const std::pair<NodeId, NodeId>> children)
    : n_(n), children_(children.begin(), children.end()) {
  if (n == 0) throw Error(Errc::TooFewElements, "partition tree needs at least one element");
  if (children.size() + 1 != n)
    throw Error(Errc::MalformedDocument, "partition tree: expected " + std::to_string(n - 1) + " merges");

  members_.resize(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) members_[i] = {i};
  for (std::size_t k = 0; k < children_.size(); ++k) {
    const auto [left, right] = children_[k];
    if (left >= n + k || right >= n + k)
      throw Error(Errc::MalformedDocument, "partition tree: merge " + std::to_string(k) + " is not topological");
    auto& out = members_[n + k];
    std::merge(members_[left].begin(), members_[left].end(), members_[right].begin(), members_[right].end(),
               std::back_inserter(out));
  }

  auto first_member = [&](NodeId node) { return members_[node].front(); };

  layers_.reserve(n);
  parents_.reserve(n);
  layers_.push_back({2 * n - 2});
  parents_.emplace_back();
  for (std::size_t depth = 1; depth < n; ++depth) {
    // Undoing merges newest first: the split node is the newest one still whole.
    const NodeId split = n + (n - 1 - depth);
    const auto& prev = layers_.back();
    const auto [left, right] = children_[split - n];

    std::vector<NodeId> next;
    std::vector<std::size_t> parent;
    next.reserve(prev.size() + 1);
    parent.reserve(prev.size() + 1);
    const NodeId inserted = first_member(left) < first_member(right) ? right : left;
    const NodeId kept = inserted == left ? right : left;
    bool placed = false;
    for (std::size_t k = 0; k < prev.size(); ++k) {
      const NodeId node = prev[k];
      if (!placed && node != split && first_member(inserted) < first_member(node)) {
        // belongs before `node`; its container is the split node
        const auto where = std::find(prev.begin(), prev.end(), split) - prev.begin();
        next.push_back(inserted);
        parent.push_back(static_cast<std::size_t>(where));
        placed = true;
      }
      next.push_back(node == split ? kept : node);
      parent.push_back(k);
    }
    if (!placed) {
      const auto where = std::find(prev.begin(), prev.end(), split) - prev.begin();
      next.push_back(inserted);
      parent.push_back(static_cast<std::size_t>(where));
    }
    layers_.push_back(std::move(next));
    parents_.push_back(std::move(parent));
  }
}

void PartitionTree::check_depth(std::size_t depth) const {
  if (depth >= layers_.size())
    throw Error(Errc::DepthOutOfRange, "depth " + std::to_string(depth) + " out of range [0, " +
                                           std::to_string(layers_.size() - 1) + "]");
}

std::span<const NodeId> PartitionTree::layer_nodes(std::size_t depth) const {
  check_depth(depth);
  return layers_[depth];
}

std::span<const std::size_t> PartitionTree::parents(std::size_t depth) const {
  check_depth(depth);
  return parents_[depth];
}

NodeId PartitionTree::split_node(std::size_t depth) const {
  check_depth(depth);
  if (depth == 0) throw Error(Errc::DepthOutOfRange, "the root layer has no split");
  return n_ + (n_ - 1 - depth);
}

Partition PartitionTree::layer(std::size_t depth) const {
  check_depth(depth);
  Partition p;
  p.depth = depth;
  p.clusters.reserve(layers_[depth].size());
  for (NodeId node : layers_[depth]) p.clusters.push_back({node, members_[node]});
  return p;
}

Partition cut_at_depth(const PartitionTree& tree, std::ptrdiff_t depth) {
  if (depth < 0 || static_cast<std::size_t>(depth) >= tree.depth_count())
    throw Error(Errc::DepthOutOfRange, "depth " + std::to_string(depth) + " out of range [0, " +
                                           std::to_string(tree.depth_count() - 1) + "]");
  return tree.layer(static_cast<std::size_t>(depth));
}

std::vector<Partition> ancestor_chain(const PartitionTree& tree, std::ptrdiff_t depth, std::size_t k) {
  if (depth < 0 || static_cast<std::size_t>(depth) >= tree.depth_count())
    throw Error(Errc::DepthOutOfRange, "depth " + std::to_string(depth) + " out of range [0, " +
                                           std::to_string(tree.depth_count() - 1) + "]");
  const auto d = static_cast<std::size_t>(depth);
  const std::size_t first = d > k ? d - k : 0;
  std::vector<Partition> chain;
  chain.reserve(d - first);
  for (std::size_t level = first; level < d; ++level) chain.push_back(tree.layer(level));
  return chain;
}

}  // namespace hcmap
