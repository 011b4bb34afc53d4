#pragma once

// Focus+context comparison of two partition trees: the two focus partitions
// are joined by intersection edges, each side keeps a few coarser ancestor
// layers as context, and thin edges diverging from the bulk are flagged as
// moot points.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hcmap/partition_tree.hpp"

namespace hcmap {

enum class Side { Left, Right };

constexpr double kDefaultTau = 0.1;
constexpr std::size_t kDefaultContextLayers = 2;

struct ComparisonSelection {
  std::ptrdiff_t left_depth = 0;
  std::ptrdiff_t right_depth = 0;
  std::size_t context_layers = kDefaultContextLayers;

  friend bool operator==(const ComparisonSelection&, const ComparisonSelection&) = default;
};

/// Stable cluster identity: side, depth of its layer, index within the layer.
struct ClusterRef {
  Side side = Side::Left;
  std::size_t depth = 0;
  std::size_t index = 0;

  friend bool operator==(const ClusterRef&, const ClusterRef&) = default;
};

/// Short display name such as "L2.0" or "R3.1".
std::string to_string(const ClusterRef& ref);

struct IntersectionEdge {
  std::size_t left = 0;   // index into the left focus partition
  std::size_t right = 0;  // index into the right focus partition
  std::size_t weight = 0;
  std::vector<std::size_t> members;
  bool outlier = false;

  friend bool operator==(const IntersectionEdge&, const IntersectionEdge&) = default;
};

/// Parent cluster at `parent_depth` contains child cluster at parent_depth + 1.
struct ContainmentEdge {
  Side side = Side::Left;
  std::size_t parent_depth = 0;
  std::size_t parent = 0;
  std::size_t child = 0;
  std::size_t weight = 0;

  friend bool operator==(const ContainmentEdge&, const ContainmentEdge&) = default;
};

struct ComparisonGraph {
  std::vector<std::string> labels;
  ComparisonSelection selection;
  std::vector<Partition> left_context;  // coarsest first
  Partition left_focus;
  Partition right_focus;
  std::vector<Partition> right_context;  // coarsest first
  std::vector<ContainmentEdge> context_edges;
  std::vector<IntersectionEdge> focus_edges;
  double ari = 0.0;
  std::optional<double> tau;  // set once outliers have been flagged

  std::size_t element_count() const { return labels.size(); }

  friend bool operator==(const ComparisonGraph&, const ComparisonGraph&) = default;
};

/// One edge per nonempty intersection, sorted by (left index, right index).
std::vector<IntersectionEdge> intersect_partitions(const Partition& left, const Partition& right);

/// Labels default to the element indices when `labels` is empty.
ComparisonGraph build_comparison_graph(const PartitionTree& left, const PartitionTree& right,
                                       const ComparisonSelection& selection,
                                       std::vector<std::string> labels = {});

/// Flags edge (A, B) when weight / min(|A|, |B|) <= tau and the edge is not
/// of maximal weight at either endpoint. tau must lie in (0, 1).
ComparisonGraph flag_outliers(ComparisonGraph graph, double tau = kDefaultTau);

/// Sorted element indices carried by flagged edges.
std::vector<std::size_t> moot_points(const ComparisonGraph& graph);

double adjusted_rand_index(const Partition& p, const Partition& q);

/// Sorted member labels of focus edge `edge`.
std::vector<std::string> intersection_members(const ComparisonGraph& graph, std::size_t edge);

/// Index of the focus edge joining left cluster `left` to right cluster
/// `right`, if they intersect.
std::optional<std::size_t> find_focus_edge(const ComparisonGraph& graph, std::size_t left, std::size_t right);

/// cluster size / n for each cluster of a displayed layer.
std::vector<double> node_weights(const Partition& layer, std::size_t n);

enum class Refinement { Identical, RightRefinesLeft, LeftRefinesRight, Neither };
std::string_view to_string(Refinement verdict);

/// Derived from the focus edges: Q refines P when every Q cluster has a
/// single incident edge.
Refinement refinement_verdict(const ComparisonGraph& graph);

/// Throws ElementSetMismatch unless every focus cluster's edge weights sum
/// to its size and the focus edges account for all n elements on each side.
void check_flow_conservation(const ComparisonGraph& graph);

}  // namespace hcmap
