#pragma once

// Sankey-style layered layout of a comparison graph. Columns run
// left context (coarsest -> finest), left focus, right focus, right context
// (finest -> coarsest). Node heights and ribbon thicknesses share one scale,
// usable height / n, so every node's ribbons tile it exactly.

#include <cstddef>
#include <span>
#include <vector>

#include "hcmap/comparison.hpp"

namespace hcmap {

enum class RibbonKind { Context, Focus };

struct LayerNode {
  ClusterRef cluster;
  std::size_t size = 0;
};

/// Joins node `from` of layer `layer` to node `to` of layer `layer + 1`.
/// `ref` indexes the originating context or focus edge of the graph.
struct LayerEdge {
  std::size_t layer = 0;
  std::size_t from = 0;
  std::size_t to = 0;
  std::size_t weight = 1;
  RibbonKind kind = RibbonKind::Focus;
  std::size_t ref = 0;
};

struct LayeredGraph {
  std::size_t n = 0;
  std::vector<std::vector<LayerNode>> layers;
  std::vector<double> x;  // evenly spaced in [0, 1]
  std::vector<LayerEdge> edges;
  std::size_t left_focus_layer = 0;
};

/// order[layer][position] = node index within that layer.
using Ordering = std::vector<std::vector<std::size_t>>;

struct OrderResult {
  Ordering order;
  std::size_t initial_crossings = 0;
  std::size_t crossings = 0;
  std::size_t sweeps = 0;
  std::size_t accepted_sweeps = 0;
};

struct LayoutOptions {
  double width = 960.0;
  double height = 600.0;
  double margin = 20.0;
  double node_width = 12.0;
  double padding = 8.0;
  /// Floor applied to the visible extent of nodes and ribbons only.
  double min_visible = 2.0;
};

struct LayoutNode {
  ClusterRef cluster;
  std::size_t layer = 0;
  std::size_t position = 0;
  std::size_t size = 0;
  double x = 0, y = 0, width = 0, height = 0;
  double visible_height = 0;
  double label_x = 0, label_y = 0;

  friend bool operator==(const LayoutNode&, const LayoutNode&) = default;
};

struct LayoutRibbon {
  RibbonKind kind = RibbonKind::Focus;
  std::size_t edge = 0;    // index into context_edges or focus_edges
  std::size_t source = 0;  // index into LayoutGraph::nodes
  std::size_t target = 0;
  std::size_t weight = 0;
  double thickness = 0;
  double visible_thickness = 0;
  double source_y0 = 0, source_y1 = 0;
  double target_y0 = 0, target_y1 = 0;
  bool outlier = false;

  friend bool operator==(const LayoutRibbon&, const LayoutRibbon&) = default;
};

struct LayoutGraph {
  double width = 0;
  double height = 0;
  std::size_t layer_count = 0;
  std::vector<LayoutNode> nodes;  // sorted by (layer, position)
  std::vector<LayoutRibbon> ribbons;

  friend bool operator==(const LayoutGraph&, const LayoutGraph&) = default;
};

LayeredGraph assign_layers(const ComparisonGraph& graph);

/// Canonical partition order in every layer.
Ordering initial_order(const LayeredGraph& layered);

/// Exact number of pairwise crossings between ribbons of consecutive layers.
std::size_t count_crossings(const Ordering& order, std::span<const LayerEdge> edges);

/// Alternating weighted-barycenter sweeps from `initial`. A sweep is kept
/// only if it strictly lowers the crossing count; iteration stops after two
/// consecutive rejected sweeps or `max_sweeps` (default 4 * layer count).
OrderResult order_nodes(const Ordering& initial, std::span<const LayerEdge> edges, std::size_t max_sweeps = 0);

LayoutGraph size_and_place(const LayeredGraph& layered, const Ordering& order, const ComparisonGraph& graph,
                           const LayoutOptions& options = {});

LayoutGraph compute_layout(const ComparisonGraph& graph, const LayoutOptions& options = {});

}  // namespace hcmap
