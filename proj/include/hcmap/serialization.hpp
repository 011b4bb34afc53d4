#pragma once

// CSV ingestion and versioned JSON documents.
//
// Every JSON document is an envelope
//   {"schema_version": "1", "kind": <kind>, "payload": {...}}
// written with a fixed field order, so identical documents produce identical
// bytes. Doubles are printed with 17 significant digits and read back exactly.

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hcmap/comparison.hpp"
#include "hcmap/distances.hpp"
#include "hcmap/layout.hpp"
#include "hcmap/linkage.hpp"

namespace hcmap {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "1";

enum class DocumentKind { Series, Distances, Dendrogram, Tree, Comparison, Layout };

std::string_view to_string(DocumentKind kind);
std::string_view to_string(Linkage method);
Linkage parse_linkage(std::string_view name);

/// A clustered hypothesis: element labels, the linkage used and its
/// dendrogram. The partition tree is rebuilt from the dendrogram on load.
struct TreeDocument {
  std::vector<std::string> labels;
  Linkage linkage = Linkage::Average;
  Dendrogram dendrogram;

  PartitionTree tree() const { return build_partition_tree(dendrogram); }

  friend bool operator==(const TreeDocument&, const TreeDocument&) = default;
};

/// Returns `other` with its leaves renumbered to follow `reference`'s label
/// order. Throws ElementSetMismatch when the label sets differ.
TreeDocument align_labels(const TreeDocument& reference, TreeDocument other);

using Document = std::variant<TimeSeriesSet, DistanceMatrix, Dendrogram, TreeDocument, ComparisonGraph, LayoutGraph>;

DocumentKind kind_of(const Document& doc);

Json to_payload(const TimeSeriesSet& series);
Json to_payload(const DistanceMatrix& dmat);
Json to_payload(const Dendrogram& dendro);
Json to_payload(const TreeDocument& tree);
/// Includes derived fields for consumers: cluster weights, edge member
/// labels and the moot-point list.
Json to_payload(const ComparisonGraph& graph);
Json to_payload(const LayoutGraph& layout);

Json to_json(const Document& doc);
/// Throws SchemaVersionMismatch for a foreign version, MalformedDocument for
/// anything else that does not describe a valid document.
Document from_json(const Json& json);

std::string dump_document(const Document& doc);
Document parse_document(std::string_view text);

void write_json(const std::filesystem::path& path, const Document& doc);
Document read_json(const std::filesystem::path& path);

template <typename T>
T read_json_as(const std::filesystem::path& path) {
  Document doc = read_json(path);
  if (auto* value = std::get_if<T>(&doc)) return std::move(*value);
  throw Error(Errc::MalformedDocument,
              path.string() + ": unexpected document kind '" + std::string(to_string(kind_of(doc))) + "'");
}

/// First column is the series id, the rest are observations in time order.
/// A header row is detected by a non-numeric second cell.
TimeSeriesSet parse_series_csv(std::string_view text);
TimeSeriesSet load_series_csv(const std::filesystem::path& path);
std::string format_series_csv(const TimeSeriesSet& series);

/// Square matrix with an id header row and an id column. Accepts asymmetry up
/// to 1e-9 and diagonal entries up to 1e-12, then symmetrizes by averaging.
DistanceMatrix parse_distance_csv(std::string_view text);
DistanceMatrix load_distance_matrix(const std::filesystem::path& path);
std::string format_distance_csv(const DistanceMatrix& dmat);

}  // namespace hcmap
