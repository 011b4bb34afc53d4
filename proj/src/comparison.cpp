#include "hcmap/comparison.hpp"

#include <algorithm>
#include <map>

namespace hcmap {

std::string to_string(const ClusterRef& ref) {
  return std::string(ref.side == Side::Left ? "L" : "R") + std::to_string(ref.depth) + "." +
         std::to_string(ref.index);
}

std::vector<IntersectionEdge> intersect_partitions(const Partition& left, const Partition& right) {
  const auto left_of = left.membership();
  const auto right_of = right.membership();
  if (left_of.size() != right_of.size())
    throw Error(Errc::ElementSetMismatch, "partitions cover " + std::to_string(left_of.size()) + " and " +
                                              std::to_string(right_of.size()) + " elements");

  std::vector<IntersectionEdge> edges;
  std::vector<std::size_t> slot(right.clusters.size());
  std::vector<std::size_t> touched;
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::fill(slot.begin(), slot.end(), unset);
  for (std::size_t i = 0; i < left.clusters.size(); ++i) {
    const std::size_t first = edges.size();
    touched.clear();
    for (std::size_t e : left.clusters[i].members) {
      const std::size_t j = right_of[e];
      if (slot[j] == unset) {
        slot[j] = edges.size();
        touched.push_back(j);
        edges.push_back({i, j, 0, {}, false});
      }
      auto& edge = edges[slot[j]];
      edge.members.push_back(e);
      ++edge.weight;
    }
    for (std::size_t j : touched) slot[j] = unset;
    std::sort(edges.begin() + static_cast<std::ptrdiff_t>(first), edges.end(),
              [](const IntersectionEdge& a, const IntersectionEdge& b) { return a.right < b.right; });
  }
  return edges;
}

namespace {

void append_containment(const PartitionTree& tree, Side side, std::size_t first, std::size_t last,
                        std::vector<ContainmentEdge>& out) {
  // edges between consecutive depths in [first, last]
  for (std::size_t depth = first + 1; depth <= last; ++depth) {
    const auto parents = tree.parents(depth);
    const auto nodes = tree.layer_nodes(depth);
    for (std::size_t child = 0; child < parents.size(); ++child)
      out.push_back({side, depth - 1, parents[child], child, tree.members(nodes[child]).size()});
  }
}

}  // namespace

ComparisonGraph build_comparison_graph(const PartitionTree& left, const PartitionTree& right,
                                       const ComparisonSelection& selection, std::vector<std::string> labels) {
  if (left.size() != right.size())
    throw Error(Errc::ElementSetMismatch, "trees cover " + std::to_string(left.size()) + " and " +
                                              std::to_string(right.size()) + " elements");
  if (labels.empty()) {
    labels.reserve(left.size());
    for (std::size_t i = 0; i < left.size(); ++i) labels.push_back(std::to_string(i));
  } else if (labels.size() != left.size()) {
    throw Error(Errc::ElementSetMismatch, "expected " + std::to_string(left.size()) + " labels");
  }

  ComparisonGraph graph;
  graph.labels = std::move(labels);
  graph.selection = selection;
  graph.left_focus = cut_at_depth(left, selection.left_depth);
  graph.right_focus = cut_at_depth(right, selection.right_depth);
  graph.left_context = ancestor_chain(left, selection.left_depth, selection.context_layers);
  graph.right_context = ancestor_chain(right, selection.right_depth, selection.context_layers);

  const auto ld = static_cast<std::size_t>(selection.left_depth);
  const auto rd = static_cast<std::size_t>(selection.right_depth);
  append_containment(left, Side::Left, ld - graph.left_context.size(), ld, graph.context_edges);
  append_containment(right, Side::Right, rd - graph.right_context.size(), rd, graph.context_edges);

  graph.focus_edges = intersect_partitions(graph.left_focus, graph.right_focus);
  graph.ari = adjusted_rand_index(graph.left_focus, graph.right_focus);
  return graph;
}

ComparisonGraph flag_outliers(ComparisonGraph graph, double tau) {
  if (!(tau > 0.0 && tau < 1.0))
    throw Error(Errc::TauOutOfRange, "tau must lie in (0, 1), got " + std::to_string(tau));
  std::vector<std::size_t> left_max(graph.left_focus.clusters.size(), 0);
  std::vector<std::size_t> right_max(graph.right_focus.clusters.size(), 0);
  for (const auto& e : graph.focus_edges) {
    left_max.at(e.left) = std::max(left_max[e.left], e.weight);
    right_max.at(e.right) = std::max(right_max[e.right], e.weight);
  }
  for (auto& e : graph.focus_edges) {
    const std::size_t smaller =
        std::min(graph.left_focus.clusters[e.left].size(), graph.right_focus.clusters[e.right].size());
    const double ratio = static_cast<double>(e.weight) / static_cast<double>(smaller);
    e.outlier = ratio <= tau && e.weight < left_max[e.left] && e.weight < right_max[e.right];
  }
  graph.tau = tau;
  return graph;
}

std::vector<std::size_t> moot_points(const ComparisonGraph& graph) {
  std::vector<std::size_t> out;
  for (const auto& e : graph.focus_edges)
    if (e.outlier) out.insert(out.end(), e.members.begin(), e.members.end());
  std::sort(out.begin(), out.end());
  return out;
}

double adjusted_rand_index(const Partition& p, const Partition& q) {
  const auto p_of = p.membership();
  const auto q_of = q.membership();
  if (p_of.size() != q_of.size())
    throw Error(Errc::ElementSetMismatch, "partitions cover " + std::to_string(p_of.size()) + " and " +
                                              std::to_string(q_of.size()) + " elements");
  auto pairs = [](std::size_t m) { return static_cast<double>(m) * static_cast<double>(m ? m - 1 : 0) / 2.0; };

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> table;
  for (std::size_t e = 0; e < p_of.size(); ++e) ++table[{p_of[e], q_of[e]}];
  double index = 0.0;
  for (const auto& [cell, count] : table) index += pairs(count);
  double row = 0.0, col = 0.0;
  for (const auto& c : p.clusters) row += pairs(c.size());
  for (const auto& c : q.clusters) col += pairs(c.size());

  const double total = pairs(p_of.size());
  const double expected = total > 0.0 ? row * col / total : 0.0;
  const double maximum = (row + col) / 2.0;
  // Only identical trivial partitions (all singletons, or one cluster) reach this.
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

std::vector<std::string> intersection_members(const ComparisonGraph& graph, std::size_t edge) {
  if (edge >= graph.focus_edges.size())
    throw Error(Errc::UnknownEdge, "no focus edge " + std::to_string(edge));
  std::vector<std::string> out;
  for (std::size_t e : graph.focus_edges[edge].members) out.push_back(graph.labels.at(e));
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::size_t> find_focus_edge(const ComparisonGraph& graph, std::size_t left, std::size_t right) {
  const auto it = std::lower_bound(graph.focus_edges.begin(), graph.focus_edges.end(), std::pair{left, right},
                                   [](const IntersectionEdge& e, const std::pair<std::size_t, std::size_t>& key) {
                                     return std::pair{e.left, e.right} < key;
                                   });
  if (it == graph.focus_edges.end() || it->left != left || it->right != right) return std::nullopt;
  return static_cast<std::size_t>(it - graph.focus_edges.begin());
}

std::vector<double> node_weights(const Partition& layer, std::size_t n) {
  std::vector<double> out;
  out.reserve(layer.clusters.size());
  for (const auto& c : layer.clusters) out.push_back(static_cast<double>(c.size()) / static_cast<double>(n));
  return out;
}

std::string_view to_string(Refinement verdict) {
  switch (verdict) {
    case Refinement::Identical: return "identical";
    case Refinement::RightRefinesLeft: return "right refines left";
    case Refinement::LeftRefinesRight: return "left refines right";
    case Refinement::Neither: return "neither";
  }
  return "neither";
}

Refinement refinement_verdict(const ComparisonGraph& graph) {
  std::vector<std::size_t> left_degree(graph.left_focus.clusters.size(), 0);
  std::vector<std::size_t> right_degree(graph.right_focus.clusters.size(), 0);
  for (const auto& e : graph.focus_edges) {
    ++left_degree.at(e.left);
    ++right_degree.at(e.right);
  }
  auto single = [](const std::vector<std::size_t>& deg) {
    return std::all_of(deg.begin(), deg.end(), [](std::size_t d) { return d == 1; });
  };
  const bool right_refines = single(right_degree);
  const bool left_refines = single(left_degree);
  if (right_refines && left_refines) return Refinement::Identical;
  if (right_refines) return Refinement::RightRefinesLeft;
  if (left_refines) return Refinement::LeftRefinesRight;
  return Refinement::Neither;
}

void check_flow_conservation(const ComparisonGraph& graph) {
  std::vector<std::size_t> left_flow(graph.left_focus.clusters.size(), 0);
  std::vector<std::size_t> right_flow(graph.right_focus.clusters.size(), 0);
  std::size_t total = 0;
  for (const auto& e : graph.focus_edges) {
    if (e.weight != e.members.size() || e.weight == 0)
      throw Error(Errc::ElementSetMismatch, "edge weight disagrees with its member list");
    left_flow.at(e.left) += e.weight;
    right_flow.at(e.right) += e.weight;
    total += e.weight;
  }
  for (std::size_t i = 0; i < left_flow.size(); ++i)
    if (left_flow[i] != graph.left_focus.clusters[i].size())
      throw Error(Errc::ElementSetMismatch, "left cluster " + std::to_string(i) + " leaks flow");
  for (std::size_t j = 0; j < right_flow.size(); ++j)
    if (right_flow[j] != graph.right_focus.clusters[j].size())
      throw Error(Errc::ElementSetMismatch, "right cluster " + std::to_string(j) + " leaks flow");
  if (total != graph.element_count())
    throw Error(Errc::ElementSetMismatch, "focus edges carry " + std::to_string(total) + " of " +
                                              std::to_string(graph.element_count()) + " elements");
}

}  // namespace hcmap
