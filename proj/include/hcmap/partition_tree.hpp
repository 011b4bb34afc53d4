#pragma once

// The tree of clusters derived from a dendrogram: layer d is the flat
// partition left after undoing the last d merges, so it has d + 1 clusters
// and layer d + 1 differs from layer d by exactly one binary split.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "hcmap/linkage.hpp"

namespace hcmap {

struct Cluster {
  NodeId node = 0;                   // dendrogram node this cluster corresponds to
  std::vector<std::size_t> members;  // sorted element indices

  std::size_t size() const { return members.size(); }
  friend bool operator==(const Cluster&, const Cluster&) = default;
};

/// Clusters in canonical order (ascending smallest member).
struct Partition {
  std::size_t depth = 0;
  std::vector<Cluster> clusters;

  std::size_t element_count() const;
  /// cluster index of each element; throws ElementSetMismatch unless the
  /// clusters are disjoint and cover 0..element_count()-1.
  std::vector<std::size_t> membership() const;

  friend bool operator==(const Partition&, const Partition&) = default;
};

class PartitionTree {
 public:
  PartitionTree() = default;
  /// `children[k]` are the operands of merge k, which created node n + k.
  PartitionTree(std::size_t n, std::span<const std::pair<NodeId, NodeId>> children);

  std::size_t size() const { return n_; }
  std::size_t depth_count() const { return layers_.size(); }

  /// Dendrogram node ids of layer d, canonically ordered.
  std::span<const NodeId> layer_nodes(std::size_t depth) const;
  /// For each cluster of layer d > 0, the index of its container in layer d - 1.
  std::span<const std::size_t> parents(std::size_t depth) const;
  std::span<const std::size_t> members(NodeId node) const { return members_.at(node); }
  /// The node of layer d - 1 that splits into two clusters at layer d.
  NodeId split_node(std::size_t depth) const;

  Partition layer(std::size_t depth) const;

 private:
  void check_depth(std::size_t depth) const;

  std::size_t n_ = 0;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::pair<NodeId, NodeId>> children_;
  std::vector<std::vector<NodeId>> layers_;
  std::vector<std::vector<std::size_t>> parents_;
};

template <typename Scalar>
PartitionTree build_partition_tree(const BasicDendrogram<Scalar>& dendro) {
  dendro.validate();
  std::vector<std::pair<NodeId, NodeId>> children;
  children.reserve(dendro.merges.size());
  for (const auto& m : dendro.merges) children.emplace_back(m.left, m.right);
  return PartitionTree(dendro.n, children);
}

/// Layer d. Throws DepthOutOfRange unless 0 <= d < n.
Partition cut_at_depth(const PartitionTree& tree, std::ptrdiff_t depth);

/// The up-to-k layers coarser than d, ordered coarsest first:
/// depths max(0, d - k) .. d - 1.
std::vector<Partition> ancestor_chain(const PartitionTree& tree, std::ptrdiff_t depth, std::size_t k);

}  // namespace hcmap
