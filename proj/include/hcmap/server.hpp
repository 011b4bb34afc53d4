#pragma once

// HTTP service over a pair of loaded partition trees. Each request is
// answered from its query parameters and the immutable trees alone, so
// identical queries return identical bodies; rendered graphs are memoized in
// a small LRU cache keyed on the normalized query.
//
//   GET /api/meta                     depth ranges and element labels
//   GET /api/graph?left_depth=&right_depth=[&context=&tau=&width=&height=]
//   GET /api/edge?left=&right=&left_depth=&right_depth=[...]

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "hcmap/serialization.hpp"

namespace hcmap {

struct GraphQuery {
  std::ptrdiff_t left_depth = 0;
  std::ptrdiff_t right_depth = 0;
  std::size_t context = kDefaultContextLayers;
  double tau = kDefaultTau;
  double width = LayoutOptions{}.width;
  double height = LayoutOptions{}.height;
};

/// Pure comparison logic behind the endpoints.
class ComparisonService {
 public:
  /// Aligns `right` to `left`'s label order; throws ElementSetMismatch.
  ComparisonService(const TreeDocument& left, const TreeDocument& right);

  const std::vector<std::string>& labels() const { return labels_; }
  const PartitionTree& left_tree() const { return left_; }
  const PartitionTree& right_tree() const { return right_; }
  Json meta() const;
  /// {"schema_version", "comparison": {...}, "layout": {...}}
  Json graph(const GraphQuery& query) const;
  /// Sorted labels of the intersection of focus clusters `left` and `right`;
  /// throws UnknownEdge when they do not intersect.
  std::vector<std::string> edge_members(const GraphQuery& query, std::size_t left, std::size_t right) const;

 private:
  ComparisonGraph build(const GraphQuery& query) const;

  std::vector<std::string> labels_;
  PartitionTree left_;
  PartitionTree right_;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

using QueryParams = std::multimap<std::string, std::string>;

class Server {
 public:
  explicit Server(std::size_t cache_capacity = 64);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  void load(const TreeDocument& left, const TreeDocument& right);
  bool loaded() const;
  /// Serve files from `dir` under "/".
  void set_static_dir(const std::filesystem::path& dir);

  /// Routes one request without touching the network.
  HttpResponse handle(const std::string& path, const QueryParams& params) const;

  /// Binds an ephemeral port on `host` and returns it, or -1.
  int bind_to_any_port(const std::string& host = "127.0.0.1");
  bool bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hcmap
