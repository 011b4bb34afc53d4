#include "hcmap/cli.hpp"

#include <climits>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hcmap/serialization.hpp"
#include "hcmap/server.hpp"

namespace hcmap::cli {

namespace {

struct ClusterArgs {
  std::string input;
  std::string distances;
  std::string metric = "corr";
  double theta = 0.5;
  std::optional<int> bins;
  std::string corr_method = "spearman";
  std::string linkage = "average";
  std::string out;
};

struct CompareArgs {
  std::string left;
  std::string right;
  long long left_depth = 0;
  long long right_depth = 0;
  std::size_t context = kDefaultContextLayers;
  double tau = kDefaultTau;
  std::string out;
  bool layout = false;
  std::string layout_out;
  double width = LayoutOptions{}.width;
  double height = LayoutOptions{}.height;
};

struct ReportArgs {
  std::string graph;
};

struct ServeArgs {
  std::string left;
  std::string right;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int cmd_cluster(const ClusterArgs& args, std::ostream& err) {
  if (args.input.empty() == args.distances.empty())
    throw UsageError("cluster: give exactly one of --input or --distances");

  TreeDocument doc;
  doc.linkage = parse_linkage(args.linkage);
  DistanceMatrix dmat;
  if (!args.distances.empty()) {
    dmat = load_distance_matrix(args.distances);
  } else {
    TimeSeriesSet series = load_series_csv(args.input);
    HypothesisSpec spec;
    spec.kind = args.metric == "corr" ? Hypothesis::CorrelationOnly : Hypothesis::CorrelationPlusDistribution;
    spec.theta = args.theta;
    spec.corr_method = args.corr_method == "pearson" ? CorrelationMethod::Pearson : CorrelationMethod::Spearman;
    spec.bins = args.bins;
    dmat = hypothesis_distance(series, spec);
  }
  doc.labels = dmat.ids;
  doc.dendrogram = linkage(dmat, doc.linkage);
  write_json(args.out, doc);
  err << "hcmapper: wrote " << args.out << " (" << doc.labels.size() << " elements, " << args.linkage
      << " linkage)\n";
  return 0;
}

std::ptrdiff_t checked_depth(long long depth, const PartitionTree& tree, const char* side) {
  const auto max = static_cast<long long>(tree.depth_count()) - 1;
  if (depth < 0 || depth > max)
    throw Error(Errc::DepthOutOfRange, std::string(side) + " depth " + std::to_string(depth) +
                                           " out of range [0, " + std::to_string(max) + "]");
  return static_cast<std::ptrdiff_t>(depth);
}

std::string default_layout_path(const std::string& out) {
  std::filesystem::path p(out);
  const auto stem = p.stem().string();
  return (p.parent_path() / (stem + ".layout.json")).string();
}

int cmd_compare(const CompareArgs& args, std::ostream& err) {
  if (!(args.tau > 0.0 && args.tau < 1.0)) throw UsageError("compare: --tau must lie in (0, 1)");
  const auto left = read_json_as<TreeDocument>(args.left);
  const auto right = align_labels(left, read_json_as<TreeDocument>(args.right));
  const PartitionTree left_tree = left.tree();
  const PartitionTree right_tree = right.tree();

  const ComparisonSelection selection{checked_depth(args.left_depth, left_tree, "left"),
                                      checked_depth(args.right_depth, right_tree, "right"), args.context};
  const ComparisonGraph graph =
      flag_outliers(build_comparison_graph(left_tree, right_tree, selection, left.labels), args.tau);
  write_json(args.out, graph);
  err << "hcmapper: wrote " << args.out << " (ARI " << graph.ari << ", " << moot_points(graph).size()
      << " moot points)\n";

  if (args.layout) {
    LayoutOptions options;
    options.width = args.width;
    options.height = args.height;
    const std::string path = args.layout_out.empty() ? default_layout_path(args.out) : args.layout_out;
    write_json(path, compute_layout(graph, options));
    err << "hcmapper: wrote " << path << "\n";
  }
  return 0;
}

int cmd_report(const ReportArgs& args, std::ostream& out) {
  const auto graph = read_json_as<ComparisonGraph>(args.graph);
  check_flow_conservation(graph);
  out << "elements: " << graph.element_count() << "\n";
  out << "left focus: depth " << graph.left_focus.depth << ", " << graph.left_focus.clusters.size() << " clusters\n";
  out << "right focus: depth " << graph.right_focus.depth << ", " << graph.right_focus.clusters.size()
      << " clusters\n";
  out << "ARI: " << std::setprecision(6) << graph.ari << "\n";
  out << "verdict: " << to_string(refinement_verdict(graph)) << "\n";
  if (graph.tau) out << "tau: " << *graph.tau << "\n";

  std::size_t count = 0;
  std::ostringstream lines;
  for (const auto& e : graph.focus_edges) {
    if (!e.outlier) continue;
    const std::string from = to_string(ClusterRef{Side::Left, graph.left_focus.depth, e.left});
    const std::string to = to_string(ClusterRef{Side::Right, graph.right_focus.depth, e.right});
    for (std::size_t m : e.members) {
      lines << "  " << graph.labels.at(m) << ": left " << from << " (" << graph.left_focus.clusters[e.left].size()
            << " elements) -> right " << to << " (" << graph.right_focus.clusters[e.right].size() << " elements)\n";
      ++count;
    }
  }
  out << "outliers: " << count << "\n" << lines.str();
  return 0;
}

int cmd_serve(const ServeArgs& args, std::ostream& err) {
  Server server;
  server.load(read_json_as<TreeDocument>(args.left), read_json_as<TreeDocument>(args.right));
  if (!args.static_dir.empty()) server.set_static_dir(args.static_dir);
  if (!server.bind(args.host, args.port))
    throw Error(Errc::IoError, "cannot bind " + args.host + ":" + std::to_string(args.port));
  err << "hcmapper: serving on http://" << args.host << ":" << args.port << "\n";
  server.listen_after_bind();
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compare two hierarchical clusterings of the same dataset", "hcmapper"};
  app.require_subcommand(1);

  ClusterArgs cluster;
  auto* cl = app.add_subcommand("cluster", "Cluster series or a distance matrix into a partition tree document");
  auto* input = cl->add_option("--input", cluster.input, "Time-series CSV (id, observations...)");
  auto* dist = cl->add_option("--distances", cluster.distances, "Distance-matrix CSV with id header row and column");
  input->excludes(dist);
  cl->add_option("--metric", cluster.metric, "corr: correlation only; corr-dist: correlation blended with distribution")
      ->check(CLI::IsMember({"corr", "corr-dist"}))
      ->capture_default_str();
  cl->add_option("--theta", cluster.theta, "Blend weight of the correlation part for corr-dist")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cl->add_option("--bins", cluster.bins, "Histogram bins (default ceil(sqrt(T-1)))")->check(CLI::Range(2, INT_MAX));
  cl->add_option("--corr-method", cluster.corr_method, "Correlation estimator")
      ->check(CLI::IsMember({"pearson", "spearman"}))
      ->capture_default_str();
  cl->add_option("--linkage", cluster.linkage, "Agglomeration criterion")
      ->check(CLI::IsMember({"single", "complete", "average"}))
      ->capture_default_str();
  cl->add_option("--out", cluster.out, "Output tree document")->required();

  CompareArgs compare;
  auto* cmp = app.add_subcommand("compare", "Build the comparison graph of two tree documents");
  cmp->add_option("--left", compare.left, "Left tree document")->required();
  cmp->add_option("--right", compare.right, "Right tree document")->required();
  cmp->add_option("--left-depth", compare.left_depth, "Depth of the left focus partition")->required();
  cmp->add_option("--right-depth", compare.right_depth, "Depth of the right focus partition")->required();
  cmp->add_option("--context", compare.context, "Coarser context layers per side")->capture_default_str();
  cmp->add_option("--tau", compare.tau, "Outlier threshold on relative edge weight, in (0, 1)")->capture_default_str();
  cmp->add_option("--out", compare.out, "Output comparison document")->required();
  cmp->add_flag("--layout", compare.layout, "Also write a layout document");
  cmp->add_option("--layout-out", compare.layout_out, "Layout document path (default <out>.layout.json)");
  cmp->add_option("--width", compare.width, "Canvas width")->check(CLI::PositiveNumber)->capture_default_str();
  cmp->add_option("--height", compare.height, "Canvas height")->check(CLI::PositiveNumber)->capture_default_str();

  ReportArgs report;
  auto* rep = app.add_subcommand("report", "Summarize a comparison document");
  rep->add_option("--graph", report.graph, "Comparison document")->required();

  ServeArgs serve;
  auto* srv = app.add_subcommand("serve", "Serve two tree documents over HTTP");
  srv->add_option("--left", serve.left, "Left tree document")->required();
  srv->add_option("--right", serve.right, "Right tree document")->required();
  srv->add_option("--host", serve.host, "Listen address")->capture_default_str();
  srv->add_option("--port", serve.port, "Listen port")->check(CLI::Range(1, 65535))->capture_default_str();
  srv->add_option("--static", serve.static_dir, "Directory of UI files served under /");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "hcmapper: usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*cl) return cmd_cluster(cluster, err);
    if (*cmp) return cmd_compare(compare, err);
    if (*rep) return cmd_report(report, out);
    if (*srv) return cmd_serve(serve, err);
  } catch (const UsageError& e) {
    err << "hcmapper: usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "hcmapper: error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "hcmapper: error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace hcmap::cli
