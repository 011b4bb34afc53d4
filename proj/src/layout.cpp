#include "hcmap/layout.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace hcmap {

namespace {

std::vector<LayerNode> to_layer(const Partition& p, Side side) {
  std::vector<LayerNode> out;
  out.reserve(p.clusters.size());
  for (std::size_t k = 0; k < p.clusters.size(); ++k) out.push_back({{side, p.depth, k}, p.clusters[k].size()});
  return out;
}

std::vector<std::vector<std::size_t>> positions_of(const Ordering& order) {
  std::vector<std::vector<std::size_t>> pos(order.size());
  for (std::size_t l = 0; l < order.size(); ++l) {
    pos[l].resize(order[l].size());
    for (std::size_t p = 0; p < order[l].size(); ++p) pos[l].at(order[l][p]) = p;
  }
  return pos;
}

// Fenwick tree over positions 0..size-1.
class Fenwick {
 public:
  explicit Fenwick(std::size_t size) : tree_(size + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  std::size_t prefix(std::size_t count) const {  // sum over [0, count)
    std::size_t s = 0;
    for (std::size_t i = count; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::size_t> tree_;
};

struct Neighbour {
  std::size_t node;
  std::size_t weight;
};

}  // namespace

LayeredGraph assign_layers(const ComparisonGraph& graph) {
  LayeredGraph out;
  out.n = graph.element_count();
  const std::size_t lc = graph.left_context.size();
  for (const auto& p : graph.left_context) out.layers.push_back(to_layer(p, Side::Left));
  out.layers.push_back(to_layer(graph.left_focus, Side::Left));
  out.layers.push_back(to_layer(graph.right_focus, Side::Right));
  for (auto it = graph.right_context.rbegin(); it != graph.right_context.rend(); ++it)
    out.layers.push_back(to_layer(*it, Side::Right));
  out.left_focus_layer = lc;

  const std::size_t count = out.layers.size();
  out.x.resize(count);
  for (std::size_t l = 0; l < count; ++l) out.x[l] = static_cast<double>(l) / static_cast<double>(count - 1);

  const std::size_t left_top = graph.left_focus.depth - lc;
  const std::size_t right_focus = graph.right_focus.depth;
  for (std::size_t k = 0; k < graph.context_edges.size(); ++k) {
    const auto& e = graph.context_edges[k];
    if (e.side == Side::Left) {
      out.edges.push_back({e.parent_depth - left_top, e.parent, e.child, e.weight, RibbonKind::Context, k});
    } else {
      // child sits one column left of its parent on the right-hand side
      const std::size_t child_layer = lc + 1 + (right_focus - (e.parent_depth + 1));
      out.edges.push_back({child_layer, e.child, e.parent, e.weight, RibbonKind::Context, k});
    }
  }
  for (std::size_t k = 0; k < graph.focus_edges.size(); ++k) {
    const auto& e = graph.focus_edges[k];
    out.edges.push_back({lc, e.left, e.right, e.weight, RibbonKind::Focus, k});
  }
  return out;
}

Ordering initial_order(const LayeredGraph& layered) {
  Ordering order(layered.layers.size());
  for (std::size_t l = 0; l < order.size(); ++l) {
    order[l].resize(layered.layers[l].size());
    std::iota(order[l].begin(), order[l].end(), std::size_t{0});
  }
  return order;
}

std::size_t count_crossings(const Ordering& order, std::span<const LayerEdge> edges) {
  if (order.size() < 2) return 0;
  const auto pos = positions_of(order);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> gaps(order.size() - 1);
  for (const auto& e : edges) gaps.at(e.layer).emplace_back(pos.at(e.layer).at(e.from), pos.at(e.layer + 1).at(e.to));

  std::size_t crossings = 0;
  for (std::size_t l = 0; l + 1 < order.size(); ++l) {
    auto& pairs = gaps[l];
    std::sort(pairs.begin(), pairs.end());
    Fenwick seen(order[l + 1].size());
    std::size_t inserted = 0;
    for (const auto& [from, to] : pairs) {
      // earlier ribbons (smaller source) ending strictly below this one cross it
      crossings += inserted - seen.prefix(to + 1);
      seen.add(to);
      ++inserted;
    }
  }
  return crossings;
}

OrderResult order_nodes(const Ordering& initial, std::span<const LayerEdge> edges, std::size_t max_sweeps) {
  const std::size_t layers = initial.size();
  OrderResult result;
  result.order = initial;
  result.initial_crossings = result.crossings = count_crossings(initial, edges);
  if (layers < 2) return result;
  if (max_sweeps == 0) max_sweeps = 4 * layers;

  // up[l][v]: neighbours of node v of layer l in layer l - 1; down[l][v]: in layer l + 1.
  std::vector<std::vector<std::vector<Neighbour>>> up(layers), down(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    up[l].resize(initial[l].size());
    down[l].resize(initial[l].size());
  }
  for (const auto& e : edges) {
    down[e.layer][e.from].push_back({e.to, e.weight});
    up[e.layer + 1][e.to].push_back({e.from, e.weight});
  }

  auto reorder = [](std::vector<std::size_t>& layer, const std::vector<std::vector<Neighbour>>& adjacency,
                    const std::vector<std::size_t>& neighbour_pos) {
    std::vector<double> key(adjacency.size());
    for (std::size_t p = 0; p < layer.size(); ++p) {
      const std::size_t v = layer[p];
      double sum = 0.0, total = 0.0;
      for (const auto& nb : adjacency[v]) {
        sum += static_cast<double>(nb.weight) * static_cast<double>(neighbour_pos[nb.node]);
        total += static_cast<double>(nb.weight);
      }
      key[v] = total > 0.0 ? sum / total : static_cast<double>(p);
    }
    std::stable_sort(layer.begin(), layer.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  };

  auto sweep = [&](Ordering order, bool forward) {
    auto pos = positions_of(order);
    auto refresh = [&](std::size_t l) {
      for (std::size_t p = 0; p < order[l].size(); ++p) pos[l][order[l][p]] = p;
    };
    if (forward) {
      for (std::size_t l = 1; l < layers; ++l) {
        reorder(order[l], up[l], pos[l - 1]);
        refresh(l);
      }
    } else {
      for (std::size_t l = layers - 1; l-- > 0;) {
        reorder(order[l], down[l], pos[l + 1]);
        refresh(l);
      }
    }
    return order;
  };

  bool forward = true;
  std::size_t rejected = 0;
  while (result.sweeps < max_sweeps && result.crossings > 0) {
    Ordering candidate = sweep(result.order, forward);
    ++result.sweeps;
    const std::size_t c = count_crossings(candidate, edges);
    if (c < result.crossings) {
      result.order = std::move(candidate);
      result.crossings = c;
      ++result.accepted_sweeps;
      rejected = 0;
    } else if (++rejected == 2) {
      break;
    }
    forward = !forward;
  }
  return result;
}

LayoutGraph size_and_place(const LayeredGraph& layered, const Ordering& order, const ComparisonGraph& graph,
                           const LayoutOptions& options) {
  const std::size_t layers = layered.layers.size();
  if (order.size() != layers) throw Error(Errc::ShapeMismatch, "ordering does not match layer count");
  if (layered.n == 0) throw Error(Errc::TooFewElements, "cannot lay out an empty comparison");

  std::size_t widest = 0;
  for (const auto& l : layered.layers) widest = std::max(widest, l.size());
  const double inner_height = options.height - 2.0 * options.margin;
  const double usable = inner_height - static_cast<double>(widest - 1) * options.padding;
  const double inner_width = options.width - 2.0 * options.margin - options.node_width;
  if (!(usable > 0.0) || !(inner_width >= 0.0) || options.padding < 0.0 || options.node_width <= 0.0)
    throw Error(Errc::CanvasTooSmall, "canvas " + std::to_string(options.width) + "x" +
                                          std::to_string(options.height) + " cannot fit " + std::to_string(widest) +
                                          " stacked nodes with padding " + std::to_string(options.padding));
  const double unit = usable / static_cast<double>(layered.n);

  LayoutGraph out;
  out.width = options.width;
  out.height = options.height;
  out.layer_count = layers;

  std::vector<std::size_t> first_node(layers + 1, 0);
  for (std::size_t l = 0; l < layers; ++l) first_node[l + 1] = first_node[l] + layered.layers[l].size();
  std::vector<std::size_t> node_at(first_node.back());  // (layer, node index) -> LayoutGraph node

  for (std::size_t l = 0; l < layers; ++l) {
    const auto& nodes = layered.layers[l];
    std::size_t total_size = 0;
    for (const auto& v : nodes) total_size += v.size;
    const double stack = static_cast<double>(total_size) * unit +
                         static_cast<double>(nodes.size() - 1) * options.padding;
    double y = options.margin + (inner_height - stack) / 2.0;
    const double x = options.margin + layered.x[l] * inner_width;
    const bool label_right = l <= layered.left_focus_layer;
    for (std::size_t p = 0; p < order[l].size(); ++p) {
      const std::size_t v = order[l][p];
      LayoutNode node;
      node.cluster = nodes.at(v).cluster;
      node.layer = l;
      node.position = p;
      node.size = nodes[v].size;
      node.x = x;
      node.y = y;
      node.width = options.node_width;
      node.height = static_cast<double>(node.size) * unit;
      node.visible_height = std::max(node.height, options.min_visible);
      node.label_x = label_right ? x + options.node_width + 4.0 : x - 4.0;
      node.label_y = y + node.height / 2.0;
      node_at[first_node[l] + v] = out.nodes.size();
      out.nodes.push_back(node);
      y += node.height + options.padding;
    }
  }

  out.ribbons.resize(layered.edges.size());
  std::vector<std::vector<std::size_t>> outgoing(out.nodes.size()), incoming(out.nodes.size());
  for (std::size_t k = 0; k < layered.edges.size(); ++k) {
    const auto& e = layered.edges[k];
    auto& r = out.ribbons[k];
    r.kind = e.kind;
    r.edge = e.ref;
    r.source = node_at.at(first_node[e.layer] + e.from);
    r.target = node_at.at(first_node[e.layer + 1] + e.to);
    r.weight = e.weight;
    r.thickness = static_cast<double>(e.weight) * unit;
    r.visible_thickness = std::max(r.thickness, options.min_visible);
    r.outlier = e.kind == RibbonKind::Focus && graph.focus_edges.at(e.ref).outlier;
    outgoing[r.source].push_back(k);
    incoming[r.target].push_back(k);
  }
  for (std::size_t v = 0; v < out.nodes.size(); ++v) {
    auto slot = [&](std::vector<std::size_t>& ribbons, bool at_source) {
      std::sort(ribbons.begin(), ribbons.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = out.ribbons[a];
        const auto& rb = out.ribbons[b];
        return at_source ? out.nodes[ra.target].position < out.nodes[rb.target].position
                         : out.nodes[ra.source].position < out.nodes[rb.source].position;
      });
      std::size_t cumulative = 0;
      for (std::size_t k : ribbons) {
        auto& r = out.ribbons[k];
        const double y0 = out.nodes[v].y + static_cast<double>(cumulative) * unit;
        cumulative += r.weight;
        const double y1 = out.nodes[v].y + static_cast<double>(cumulative) * unit;
        (at_source ? r.source_y0 : r.target_y0) = y0;
        (at_source ? r.source_y1 : r.target_y1) = y1;
      }
    };
    slot(outgoing[v], true);
    slot(incoming[v], false);
  }
  return out;
}

LayoutGraph compute_layout(const ComparisonGraph& graph, const LayoutOptions& options) {
  const LayeredGraph layered = assign_layers(graph);
  const OrderResult ordered = order_nodes(initial_order(layered), layered.edges);
  return size_and_place(layered, ordered.order, graph, options);
}

}  // namespace hcmap
