#include "hcmap/serialization.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace hcmap {

std::string_view to_string(DocumentKind kind) {
  switch (kind) {
    case DocumentKind::Series: return "series";
    case DocumentKind::Distances: return "distances";
    case DocumentKind::Dendrogram: return "dendrogram";
    case DocumentKind::Tree: return "tree";
    case DocumentKind::Comparison: return "comparison";
    case DocumentKind::Layout: return "layout";
  }
  return "unknown";
}

std::string_view to_string(Linkage method) {
  switch (method) {
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
  }
  return "unknown";
}

Linkage parse_linkage(std::string_view name) {
  if (name == "single") return Linkage::Single;
  if (name == "complete") return Linkage::Complete;
  if (name == "average") return Linkage::Average;
  throw Error(Errc::InvalidArgument, "unknown linkage '" + std::string(name) + "'");
}

TreeDocument align_labels(const TreeDocument& reference, TreeDocument other) {
  if (reference.labels == other.labels) return other;
  const std::size_t n = reference.labels.size();
  if (other.labels.size() != n || other.dendrogram.n != n)
    throw Error(Errc::ElementSetMismatch, "trees cover " + std::to_string(n) + " and " +
                                              std::to_string(other.labels.size()) + " elements");
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < n; ++i) position.emplace(reference.labels[i], i);
  std::vector<std::size_t> leaf(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = position.find(other.labels[i]);
    if (it == position.end())
      throw Error(Errc::ElementSetMismatch, "label '" + other.labels[i] + "' is missing from the reference tree");
    leaf[i] = it->second;
  }
  auto relabel = [&](NodeId id) { return id < n ? leaf[id] : id; };
  for (auto& m : other.dendrogram.merges) {
    const NodeId a = relabel(m.left), b = relabel(m.right);
    m.left = std::min(a, b);
    m.right = std::max(a, b);
  }
  other.labels = reference.labels;
  return other;
}

DocumentKind kind_of(const Document& doc) { return static_cast<DocumentKind>(doc.index()); }

namespace {

[[noreturn]] void malformed(const std::string& why) { throw Error(Errc::MalformedDocument, why); }

const Json& field(const Json& obj, const char* key) {
  if (!obj.is_object()) malformed(std::string("expected an object holding '") + key + "'");
  const auto it = obj.find(key);
  if (it == obj.end()) malformed(std::string("missing field '") + key + "'");
  return *it;
}

std::size_t get_index(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    malformed(std::string("field '") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

double get_real(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_number()) malformed(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

bool get_bool(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_boolean()) malformed(std::string("field '") + key + "' must be a boolean");
  return v.get<bool>();
}

std::string get_string(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_string()) malformed(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

const Json& get_array(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_array()) malformed(std::string("field '") + key + "' must be an array");
  return v;
}

std::vector<std::string> get_strings(const Json& obj, const char* key) {
  std::vector<std::string> out;
  for (const auto& v : get_array(obj, key)) {
    if (!v.is_string()) malformed(std::string("field '") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<std::size_t> get_indices(const Json& obj, const char* key) {
  std::vector<std::size_t> out;
  for (const auto& v : get_array(obj, key)) {
    if (!v.is_number_unsigned()) malformed(std::string("field '") + key + "' must hold non-negative integers");
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

Json matrix_rows(const Matrix<double>& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix<double> read_matrix(const Json& rows, Index expected_rows) {
  if (static_cast<Index>(rows.size()) != expected_rows) malformed("matrix row count does not match ids");
  const Index cols = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  Matrix<double> m(expected_rows, cols);
  for (Index i = 0; i < expected_rows; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) malformed("matrix rows are ragged");
    for (Index j = 0; j < cols; ++j) {
      const Json& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) malformed("matrix entries must be numbers");
      m(i, j) = v.get<double>();
    }
  }
  return m;
}

std::string_view side_name(Side side) { return side == Side::Left ? "left" : "right"; }

Side parse_side(const std::string& s) {
  if (s == "left") return Side::Left;
  if (s == "right") return Side::Right;
  malformed("unknown side '" + s + "'");
}

Json cluster_ref(const ClusterRef& ref) {
  Json j;
  j["side"] = side_name(ref.side);
  j["depth"] = ref.depth;
  j["index"] = ref.index;
  return j;
}

ClusterRef read_cluster_ref(const Json& j) {
  return {parse_side(get_string(j, "side")), get_index(j, "depth"), get_index(j, "index")};
}

Json partition_json(const Partition& p, std::size_t n) {
  Json j;
  j["depth"] = p.depth;
  Json clusters = Json::array();
  for (std::size_t k = 0; k < p.clusters.size(); ++k) {
    const auto& c = p.clusters[k];
    Json cj;
    cj["index"] = k;
    cj["node"] = c.node;
    cj["size"] = c.size();
    cj["weight"] = n ? static_cast<double>(c.size()) / static_cast<double>(n) : 0.0;
    cj["members"] = c.members;
    clusters.push_back(std::move(cj));
  }
  j["clusters"] = std::move(clusters);
  return j;
}

Partition read_partition(const Json& j) {
  Partition p;
  p.depth = get_index(j, "depth");
  for (const auto& cj : get_array(j, "clusters")) {
    Cluster c{get_index(cj, "node"), get_indices(cj, "members")};
    if (c.members.empty() || !std::is_sorted(c.members.begin(), c.members.end()))
      malformed("cluster members must be a sorted non-empty list");
    if (get_index(cj, "size") != c.size()) malformed("cluster size disagrees with its members");
    p.clusters.push_back(std::move(c));
  }
  p.membership();
  return p;
}

std::vector<Partition> read_partitions(const Json& obj, const char* key) {
  std::vector<Partition> out;
  for (const auto& pj : get_array(obj, key)) out.push_back(read_partition(pj));
  return out;
}

TimeSeriesSet series_from(const Json& p) {
  TimeSeriesSet s;
  s.ids = get_strings(p, "ids");
  s.values = read_matrix(get_array(p, "values"), static_cast<Index>(s.ids.size()));
  s.validate();
  return s;
}

DistanceMatrix distances_from(const Json& p) {
  DistanceMatrix d;
  d.ids = get_strings(p, "ids");
  d.d = read_matrix(get_array(p, "d"), static_cast<Index>(d.ids.size()));
  d.validate();
  return d;
}

Dendrogram dendrogram_from(const Json& p) {
  Dendrogram dendro;
  dendro.n = get_index(p, "n");
  for (const auto& m : get_array(p, "merges"))
    dendro.merges.push_back({get_index(m, "left"), get_index(m, "right"), get_real(m, "height"), get_index(m, "node")});
  dendro.validate();
  return dendro;
}

TreeDocument tree_from(const Json& p) {
  TreeDocument t;
  t.labels = get_strings(p, "labels");
  t.linkage = parse_linkage(get_string(p, "linkage"));
  t.dendrogram = dendrogram_from(field(p, "dendrogram"));
  if (t.labels.size() != t.dendrogram.n) malformed("tree labels do not match leaf count");
  return t;
}

ComparisonGraph comparison_from(const Json& p) {
  ComparisonGraph g;
  g.labels = get_strings(p, "labels");
  if (get_index(p, "n") != g.labels.size()) malformed("comparison n disagrees with labels");
  const Json& sel = field(p, "selection");
  g.selection.left_depth = static_cast<std::ptrdiff_t>(get_index(sel, "left_depth"));
  g.selection.right_depth = static_cast<std::ptrdiff_t>(get_index(sel, "right_depth"));
  g.selection.context_layers = get_index(sel, "context_layers");
  const Json& tau = field(p, "tau");
  if (!tau.is_null()) {
    if (!tau.is_number()) malformed("field 'tau' must be a number or null");
    g.tau = tau.get<double>();
  }
  g.ari = get_real(p, "ari");
  g.left_context = read_partitions(p, "left_context");
  g.left_focus = read_partition(field(p, "left_focus"));
  g.right_focus = read_partition(field(p, "right_focus"));
  g.right_context = read_partitions(p, "right_context");
  for (const auto& e : get_array(p, "context_edges"))
    g.context_edges.push_back({parse_side(get_string(e, "side")), get_index(e, "parent_depth"), get_index(e, "parent"),
                               get_index(e, "child"), get_index(e, "weight")});
  for (const auto& e : get_array(p, "focus_edges")) {
    IntersectionEdge edge{get_index(e, "left"), get_index(e, "right"), get_index(e, "weight"),
                          get_indices(e, "members"), get_bool(e, "outlier")};
    if (edge.left >= g.left_focus.clusters.size() || edge.right >= g.right_focus.clusters.size())
      malformed("focus edge references an unknown cluster");
    for (std::size_t m : edge.members)
      if (m >= g.labels.size()) malformed("focus edge member out of range");
    g.focus_edges.push_back(std::move(edge));
  }
  return g;
}

LayoutGraph layout_from(const Json& p) {
  LayoutGraph l;
  l.width = get_real(p, "width");
  l.height = get_real(p, "height");
  l.layer_count = get_index(p, "layer_count");
  for (const auto& nj : get_array(p, "nodes")) {
    LayoutNode n;
    n.cluster = read_cluster_ref(field(nj, "cluster"));
    n.layer = get_index(nj, "layer");
    n.position = get_index(nj, "position");
    n.size = get_index(nj, "size");
    n.x = get_real(nj, "x");
    n.y = get_real(nj, "y");
    n.width = get_real(nj, "width");
    n.height = get_real(nj, "height");
    n.visible_height = get_real(nj, "visible_height");
    n.label_x = get_real(nj, "label_x");
    n.label_y = get_real(nj, "label_y");
    l.nodes.push_back(n);
  }
  for (const auto& rj : get_array(p, "ribbons")) {
    LayoutRibbon r;
    const std::string kind = get_string(rj, "kind");
    if (kind != "context" && kind != "focus") malformed("unknown ribbon kind '" + kind + "'");
    r.kind = kind == "focus" ? RibbonKind::Focus : RibbonKind::Context;
    r.edge = get_index(rj, "edge");
    r.source = get_index(rj, "source");
    r.target = get_index(rj, "target");
    if (r.source >= l.nodes.size() || r.target >= l.nodes.size()) malformed("ribbon references an unknown node");
    r.weight = get_index(rj, "weight");
    r.thickness = get_real(rj, "thickness");
    r.visible_thickness = get_real(rj, "visible_thickness");
    r.source_y0 = get_real(rj, "source_y0");
    r.source_y1 = get_real(rj, "source_y1");
    r.target_y0 = get_real(rj, "target_y0");
    r.target_y1 = get_real(rj, "target_y1");
    r.outlier = get_bool(rj, "outlier");
    l.ribbons.push_back(r);
  }
  return l;
}

}  // namespace

Json to_payload(const TimeSeriesSet& series) {
  Json p;
  p["ids"] = series.ids;
  p["values"] = matrix_rows(series.values);
  return p;
}

Json to_payload(const DistanceMatrix& dmat) {
  Json p;
  p["ids"] = dmat.ids;
  p["d"] = matrix_rows(dmat.d);
  return p;
}

Json to_payload(const Dendrogram& dendro) {
  Json p;
  p["n"] = dendro.n;
  Json merges = Json::array();
  for (const auto& m : dendro.merges) {
    Json mj;
    mj["left"] = m.left;
    mj["right"] = m.right;
    mj["height"] = m.height;
    mj["node"] = m.node;
    merges.push_back(std::move(mj));
  }
  p["merges"] = std::move(merges);
  return p;
}

Json to_payload(const TreeDocument& tree) {
  Json p;
  p["labels"] = tree.labels;
  p["linkage"] = to_string(tree.linkage);
  p["layer_count"] = tree.dendrogram.n;
  p["dendrogram"] = to_payload(tree.dendrogram);
  return p;
}

Json to_payload(const ComparisonGraph& graph) {
  const std::size_t n = graph.element_count();
  Json p;
  p["n"] = n;
  p["labels"] = graph.labels;
  Json sel;
  sel["left_depth"] = graph.selection.left_depth;
  sel["right_depth"] = graph.selection.right_depth;
  sel["context_layers"] = graph.selection.context_layers;
  p["selection"] = std::move(sel);
  p["tau"] = graph.tau ? Json(*graph.tau) : Json(nullptr);
  p["ari"] = graph.ari;

  Json left_context = Json::array();
  for (const auto& part : graph.left_context) left_context.push_back(partition_json(part, n));
  p["left_context"] = std::move(left_context);
  p["left_focus"] = partition_json(graph.left_focus, n);
  p["right_focus"] = partition_json(graph.right_focus, n);
  Json right_context = Json::array();
  for (const auto& part : graph.right_context) right_context.push_back(partition_json(part, n));
  p["right_context"] = std::move(right_context);

  Json context_edges = Json::array();
  for (const auto& e : graph.context_edges) {
    Json ej;
    ej["side"] = side_name(e.side);
    ej["parent_depth"] = e.parent_depth;
    ej["parent"] = e.parent;
    ej["child"] = e.child;
    ej["weight"] = e.weight;
    context_edges.push_back(std::move(ej));
  }
  p["context_edges"] = std::move(context_edges);

  Json focus_edges = Json::array();
  Json outliers = Json::array();
  for (std::size_t k = 0; k < graph.focus_edges.size(); ++k) {
    const auto& e = graph.focus_edges[k];
    Json ej;
    ej["id"] = k;
    ej["left"] = e.left;
    ej["right"] = e.right;
    ej["weight"] = e.weight;
    ej["members"] = e.members;
    Json labels = Json::array();
    for (std::size_t m : e.members) labels.push_back(graph.labels.at(m));
    ej["labels"] = std::move(labels);
    ej["outlier"] = e.outlier;
    focus_edges.push_back(std::move(ej));
    if (!e.outlier) continue;
    for (std::size_t m : e.members) {
      Json oj;
      oj["element"] = m;
      oj["label"] = graph.labels.at(m);
      oj["edge"] = k;
      oj["left"] = to_string(ClusterRef{Side::Left, graph.left_focus.depth, e.left});
      oj["right"] = to_string(ClusterRef{Side::Right, graph.right_focus.depth, e.right});
      outliers.push_back(std::move(oj));
    }
  }
  p["focus_edges"] = std::move(focus_edges);
  p["outliers"] = std::move(outliers);
  return p;
}

Json to_payload(const LayoutGraph& layout) {
  Json p;
  p["width"] = layout.width;
  p["height"] = layout.height;
  p["layer_count"] = layout.layer_count;
  Json nodes = Json::array();
  for (const auto& n : layout.nodes) {
    Json nj;
    nj["cluster"] = cluster_ref(n.cluster);
    nj["layer"] = n.layer;
    nj["position"] = n.position;
    nj["size"] = n.size;
    nj["x"] = n.x;
    nj["y"] = n.y;
    nj["width"] = n.width;
    nj["height"] = n.height;
    nj["visible_height"] = n.visible_height;
    nj["label_x"] = n.label_x;
    nj["label_y"] = n.label_y;
    nodes.push_back(std::move(nj));
  }
  p["nodes"] = std::move(nodes);
  Json ribbons = Json::array();
  for (const auto& r : layout.ribbons) {
    Json rj;
    rj["kind"] = r.kind == RibbonKind::Focus ? "focus" : "context";
    rj["edge"] = r.edge;
    rj["source"] = r.source;
    rj["target"] = r.target;
    rj["weight"] = r.weight;
    rj["thickness"] = r.thickness;
    rj["visible_thickness"] = r.visible_thickness;
    rj["source_y0"] = r.source_y0;
    rj["source_y1"] = r.source_y1;
    rj["target_y0"] = r.target_y0;
    rj["target_y1"] = r.target_y1;
    rj["outlier"] = r.outlier;
    ribbons.push_back(std::move(rj));
  }
  p["ribbons"] = std::move(ribbons);
  return p;
}

Json to_json(const Document& doc) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = to_string(kind_of(doc));
  j["payload"] = std::visit([](const auto& value) { return to_payload(value); }, doc);
  return j;
}

Document from_json(const Json& json) {
  try {
    const Json& version = field(json, "schema_version");
    if (!version.is_string()) malformed("schema_version must be a string");
    if (version.get<std::string>() != kSchemaVersion)
      throw Error(Errc::SchemaVersionMismatch, "unsupported schema_version '" + version.get<std::string>() +
                                                   "' (expected '" + std::string(kSchemaVersion) + "')");
    const std::string kind = get_string(json, "kind");
    const Json& payload = field(json, "payload");
    if (kind == "series") return series_from(payload);
    if (kind == "distances") return distances_from(payload);
    if (kind == "dendrogram") return dendrogram_from(payload);
    if (kind == "tree") return tree_from(payload);
    if (kind == "comparison") return comparison_from(payload);
    if (kind == "layout") return layout_from(payload);
    malformed("unknown document kind '" + kind + "'");
  } catch (const Error& e) {
    if (e.code() == Errc::SchemaVersionMismatch || e.code() == Errc::MalformedDocument) throw;
    throw Error(Errc::MalformedDocument, e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedDocument, e.what());
  }
}

std::string dump_document(const Document& doc) { return to_json(doc).dump(1) + "\n"; }

Document parse_document(std::string_view text) {
  Json json;
  try {
    json = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedDocument, std::string("invalid JSON: ") + e.what());
  }
  return from_json(json);
}

void write_json(const std::filesystem::path& path, const Document& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << dump_document(doc);
  if (!out) throw Error(Errc::IoError, "failed writing " + path.string());
}

Document read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_document(buffer.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace hcmap
