#include <doctest.h>

#include "generators.hpp"
#include "hcmap/comparison.hpp"
#include "oracles.hpp"

using namespace hcmap;

namespace {

// a, b, c = 0, 1, 2
const Partition kP{1, {{0, {0, 1}}, {0, {2}}}};
const Partition kQ{1, {{0, {0}}, {0, {1, 2}}}};

Dendrogram chain(std::size_t n) {
  Dendrogram d{n, {}};
  for (std::size_t k = 0; k + 1 < n; ++k)
    d.merges.push_back({k == 0 ? 0 : n + k - 1, k + 1, static_cast<double>(k + 1), n + k});
  for (auto& m : d.merges)
    if (m.left > m.right) std::swap(m.left, m.right);
  return d;
}

// Builds a one-sided graph directly from two partitions.
ComparisonGraph graph_of(const Partition& left, const Partition& right) {
  ComparisonGraph g;
  g.labels = gen::labels(left.element_count());
  g.left_focus = left;
  g.right_focus = right;
  g.focus_edges = intersect_partitions(left, right);
  g.ari = adjusted_rand_index(left, right);
  return g;
}

}  // namespace

TEST_CASE("intersection edges by hand") {
  const auto edges = intersect_partitions(kP, kQ);
  REQUIRE(edges.size() == 3);
  CHECK((edges[0].left == 0 && edges[0].right == 0 && edges[0].weight == 1));
  CHECK((edges[1].left == 0 && edges[1].right == 1 && edges[1].weight == 1));
  CHECK((edges[2].left == 1 && edges[2].right == 1 && edges[2].weight == 1));
  CHECK(edges[1].members == std::vector<std::size_t>{1});
}

TEST_CASE("identical and star partitions") {
  const auto p = gen::partition_from_labels({0, 0, 1, 2, 2, 2});
  const auto same = intersect_partitions(p, p);
  REQUIRE(same.size() == 3);
  for (const auto& e : same) {
    CHECK(e.left == e.right);
    CHECK(e.weight == p.clusters[e.left].size());
  }
  const auto star = intersect_partitions(gen::partition_from_labels({0, 0, 0, 0}),
                                         gen::partition_from_labels({0, 1, 2, 3}));
  CHECK(star.size() == 4);
  for (const auto& e : star) CHECK(e.weight == 1);
}

TEST_CASE("self comparison is a perfect matching without outliers") {
  gen::Rng rng(4);
  const auto tree = build_partition_tree(linkage(gen::random_distances(12, rng), Linkage::Average));
  const auto g = flag_outliers(build_comparison_graph(tree, tree, {4, 4, 2}), 0.5);
  CHECK(g.focus_edges.size() == 5);
  CHECK(g.ari == 1.0);
  CHECK(moot_points(g).empty());
  CHECK(refinement_verdict(g) == Refinement::Identical);
  CHECK(g.left_context.size() == 2);
  CHECK(g.left_context[0].depth == 2);
  check_flow_conservation(g);
}

TEST_CASE("context layers") {
  const auto tree = build_partition_tree(chain(6));
  const auto none = build_comparison_graph(tree, tree, {3, 3, 0});
  CHECK(none.left_context.empty());
  CHECK(none.right_context.empty());
  CHECK(none.context_edges.empty());
  const auto clipped = build_comparison_graph(tree, tree, {1, 4, 3});
  CHECK(clipped.left_context.size() == 1);
  CHECK(clipped.right_context.size() == 3);
  // every context layer is joined to the next finer one
  std::size_t left_weight = 0;
  for (const auto& e : clipped.context_edges)
    if (e.side == Side::Left) left_weight += e.weight;
  CHECK(left_weight == 6);
  CHECK_THROWS_AS(build_comparison_graph(tree, tree, {6, 0, 0}), Error);
}

TEST_CASE("labels default to indices") {
  const auto tree = build_partition_tree(chain(3));
  const auto g = build_comparison_graph(tree, tree, {1, 1, 0});
  CHECK(g.labels == std::vector<std::string>{"0", "1", "2"});
  CHECK_THROWS_AS(build_comparison_graph(tree, tree, {1, 1, 0}, {"a"}), Error);
}

TEST_CASE("planted diverted element is the only flag") {
  // left: {0..19}, {20..29}; right: {1..19}, {0, 20..29}
  std::vector<std::size_t> left(30), right(30);
  for (std::size_t i = 0; i < 30; ++i) {
    left[i] = i < 20 ? 0 : 1;
    right[i] = (i < 20 && i != 0) ? 0 : 1;
  }
  const auto g = flag_outliers(graph_of(gen::partition_from_labels(left), gen::partition_from_labels(right)), 0.1);
  CHECK(moot_points(g) == std::vector<std::size_t>{0});
  std::size_t flagged = 0;
  for (const auto& e : g.focus_edges) flagged += e.outlier;
  CHECK(flagged == 1);
}

TEST_CASE("an even split is not flagged") {
  std::vector<std::size_t> left(20, 0), right(20);
  for (std::size_t i = 0; i < 20; ++i) right[i] = i < 10 ? 0 : 1;
  const auto g = flag_outliers(graph_of(gen::partition_from_labels(left), gen::partition_from_labels(right)), 0.1);
  CHECK(moot_points(g).empty());
}

TEST_CASE("perfect matching never flags") {
  const auto p = gen::partition_from_labels({0, 1, 1, 2, 2, 2});
  for (double tau : {0.01, 0.5, 0.99}) CHECK(moot_points(flag_outliers(graph_of(p, p), tau)).empty());
}

TEST_CASE("edge tied for maximal weight counts as maximal") {
  // left {0, 1}: one element to each right cluster; right {0, 2..21}, {1}
  std::vector<std::size_t> left(22, 1), right(22, 0);
  left[0] = left[1] = 0;
  right[1] = 1;
  const auto g = flag_outliers(graph_of(gen::partition_from_labels(left), gen::partition_from_labels(right)), 0.6);
  // (L0, R0) has ratio 1/2 and is thin at R0, but ties for the heaviest edge at L0
  CHECK(moot_points(g).empty());
}

TEST_CASE("flags grow monotonically with tau") {
  gen::Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 10 + trial % 20;
    const auto p = gen::partition_from_labels(gen::random_labels(n, 3, rng));
    const auto q = gen::partition_from_labels(gen::random_labels(n, 4, rng));
    const auto base = graph_of(p, q);
    std::vector<std::size_t> previous;
    for (double tau : {0.05, 0.1, 0.2, 0.4, 0.8}) {
      const auto moot = moot_points(flag_outliers(base, tau));
      CHECK(std::includes(moot.begin(), moot.end(), previous.begin(), previous.end()));
      previous = moot;
    }
  }
}

TEST_CASE("tau must lie strictly inside (0, 1)") {
  const auto g = graph_of(kP, kQ);
  CHECK_THROWS_AS(flag_outliers(g, 0.0), Error);
  CHECK_THROWS_AS(flag_outliers(g, 1.0), Error);
  CHECK(flag_outliers(g, 0.3).tau == 0.3);
}

TEST_CASE("adjusted rand index") {
  const auto p = gen::partition_from_labels({0, 0, 1, 1, 1});
  const auto q = gen::partition_from_labels({0, 0, 0, 1, 1});
  CHECK(adjusted_rand_index(p, q) == doctest::Approx(oracle::ari_pairs(p.membership(), q.membership())).epsilon(1e-12));
  CHECK(adjusted_rand_index(p, p) == 1.0);
  const auto singletons = gen::partition_from_labels({0, 1, 2, 3, 4});
  const auto one = gen::partition_from_labels({0, 0, 0, 0, 0});
  CHECK(adjusted_rand_index(singletons, one) == 0.0);
  CHECK(adjusted_rand_index(one, one) == 1.0);
  CHECK(adjusted_rand_index(singletons, singletons) == 1.0);

  gen::Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 9;
    const auto a = gen::partition_from_labels(gen::random_labels(n, 1 + trial % n, rng));
    const auto b = gen::partition_from_labels(gen::random_labels(n, 1 + (trial * 7) % n, rng));
    CHECK(adjusted_rand_index(a, b) == doctest::Approx(oracle::ari_pairs(a.membership(), b.membership())).epsilon(1e-12));
    CHECK(adjusted_rand_index(a, b) == adjusted_rand_index(b, a));
  }
}

TEST_CASE("intersection members and edge lookup") {
  auto g = graph_of(kP, kQ);
  g.labels = {"a", "b", "c"};
  const auto edge = find_focus_edge(g, 0, 1);
  REQUIRE(edge.has_value());
  CHECK(intersection_members(g, *edge) == std::vector<std::string>{"b"});
  CHECK_FALSE(find_focus_edge(g, 1, 0).has_value());
  CHECK_THROWS_AS(intersection_members(g, 9), Error);
  for (std::size_t e = 0; e < g.focus_edges.size(); ++e)
    CHECK(intersection_members(g, e).size() == g.focus_edges[e].weight);
}

TEST_CASE("refinement verdicts") {
  const auto coarse = gen::partition_from_labels({0, 0, 0, 1, 1});
  const auto fine = gen::partition_from_labels({0, 0, 1, 2, 2});
  CHECK(refinement_verdict(graph_of(coarse, fine)) == Refinement::RightRefinesLeft);
  CHECK(refinement_verdict(graph_of(fine, coarse)) == Refinement::LeftRefinesRight);
  CHECK(refinement_verdict(graph_of(kP, kQ)) == Refinement::Neither);
  CHECK(to_string(Refinement::RightRefinesLeft) == "right refines left");
}

TEST_CASE("node weights and flow conservation") {
  const auto w = node_weights(kP, 3);
  CHECK(w[0] == doctest::Approx(2.0 / 3));
  auto g = graph_of(kP, kQ);
  CHECK_NOTHROW(check_flow_conservation(g));
  g.focus_edges[0].weight = 2;
  CHECK_THROWS_AS(check_flow_conservation(g), Error);
}

TEST_CASE("cluster names") {
  CHECK(to_string(ClusterRef{Side::Left, 2, 0}) == "L2.0");
  CHECK(to_string(ClusterRef{Side::Right, 3, 1}) == "R3.1");
}
