#include "hcmap/server.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <list>
#include <optional>
#include <unordered_map>

#include <httplib.h>

namespace hcmap {

// --- ComparisonService -------------------------------------------------------

ComparisonService::ComparisonService(const TreeDocument& left, const TreeDocument& right)
    : labels_(left.labels), left_(left.tree()), right_(align_labels(left, right).tree()) {}

Json ComparisonService::meta() const {
  auto side = [](const PartitionTree& tree) {
    Json j;
    j["n"] = tree.size();
    Json depths;
    depths["min"] = 0;
    depths["max"] = tree.depth_count() - 1;
    j["depths"] = std::move(depths);
    return j;
  };
  Json j;
  j["left"] = side(left_);
  j["right"] = side(right_);
  j["labels"] = labels_;
  return j;
}

ComparisonGraph ComparisonService::build(const GraphQuery& query) const {
  const ComparisonSelection selection{query.left_depth, query.right_depth, query.context};
  return flag_outliers(build_comparison_graph(left_, right_, selection, labels_), query.tau);
}

Json ComparisonService::graph(const GraphQuery& query) const {
  const ComparisonGraph graph = build(query);
  LayoutOptions options;
  options.width = query.width;
  options.height = query.height;
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["comparison"] = to_payload(graph);
  j["layout"] = to_payload(compute_layout(graph, options));
  return j;
}

std::vector<std::string> ComparisonService::edge_members(const GraphQuery& query, std::size_t left,
                                                         std::size_t right) const {
  const ComparisonGraph graph = build(query);
  const auto edge = find_focus_edge(graph, left, right);
  if (!edge)
    throw Error(Errc::UnknownEdge, "clusters L" + std::to_string(left) + " and R" + std::to_string(right) +
                                       " do not intersect");
  return intersection_members(graph, *edge);
}

// --- Server ------------------------------------------------------------------

namespace {

struct BadParameter {
  std::string field;
  std::string message;
};

const std::string* find_param(const QueryParams& params, const std::string& name) {
  const auto it = params.find(name);
  return it == params.end() ? nullptr : &it->second;
}

long long integer_param(const QueryParams& params, const std::string& name, std::optional<long long> fallback) {
  const std::string* raw = find_param(params, name);
  if (!raw) {
    if (fallback) return *fallback;
    throw BadParameter{name, "missing required parameter '" + name + "'"};
  }
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), value);
  if (ec != std::errc{} || ptr != raw->data() + raw->size())
    throw BadParameter{name, "'" + name + "' must be an integer, got '" + *raw + "'"};
  return value;
}

double real_param(const QueryParams& params, const std::string& name, double fallback) {
  const std::string* raw = find_param(params, name);
  if (!raw) return fallback;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), value);
  if (ec != std::errc{} || ptr != raw->data() + raw->size() || !std::isfinite(value))
    throw BadParameter{name, "'" + name + "' must be a number, got '" + *raw + "'"};
  return value;
}

GraphQuery parse_query(const QueryParams& params, const PartitionTree& left, const PartitionTree& right) {
  GraphQuery q;
  auto depth = [&](const std::string& name, const PartitionTree& tree) {
    const long long d = integer_param(params, name, std::nullopt);
    const auto max = static_cast<long long>(tree.depth_count()) - 1;
    if (d < 0 || d > max)
      throw BadParameter{name, "'" + name + "' = " + std::to_string(d) + " out of range [0, " + std::to_string(max) + "]"};
    return static_cast<std::ptrdiff_t>(d);
  };
  q.left_depth = depth("left_depth", left);
  q.right_depth = depth("right_depth", right);
  const long long context = integer_param(params, "context", static_cast<long long>(kDefaultContextLayers));
  if (context < 0) throw BadParameter{"context", "'context' must be >= 0"};
  q.context = static_cast<std::size_t>(context);
  q.tau = real_param(params, "tau", kDefaultTau);
  if (!(q.tau > 0.0 && q.tau < 1.0)) throw BadParameter{"tau", "'tau' must lie in (0, 1)"};
  q.width = real_param(params, "width", q.width);
  q.height = real_param(params, "height", q.height);
  if (!(q.width > 0.0)) throw BadParameter{"width", "'width' must be positive"};
  if (!(q.height > 0.0)) throw BadParameter{"height", "'height' must be positive"};
  return q;
}

std::string cache_key(const GraphQuery& q) {
  auto num = [](double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
  };
  return std::to_string(q.left_depth) + "|" + std::to_string(q.right_depth) + "|" + std::to_string(q.context) + "|" +
         num(q.tau) + "|" + num(q.width) + "|" + num(q.height);
}

HttpResponse error_response(int status, const std::string& message, const std::string& field = {}) {
  Json j;
  j["error"] = message;
  if (!field.empty()) j["field"] = field;
  return {status, j.dump(), "application/json"};
}

}  // namespace

struct Server::Impl {
  httplib::Server http;
  mutable std::mutex mutex;
  std::shared_ptr<const ComparisonService> service;
  std::size_t capacity;
  mutable std::list<std::pair<std::string, std::shared_ptr<const std::string>>> lru;
  mutable std::unordered_map<std::string, decltype(lru)::iterator> index;

  std::shared_ptr<const ComparisonService> current() const {
    std::lock_guard lock(mutex);
    return service;
  }

  std::shared_ptr<const std::string> cached(const std::string& key) const {
    std::lock_guard lock(mutex);
    const auto it = index.find(key);
    if (it == index.end()) return nullptr;
    lru.splice(lru.begin(), lru, it->second);
    return it->second->second;
  }

  void remember(const std::string& key, std::shared_ptr<const std::string> body) const {
    std::lock_guard lock(mutex);
    if (capacity == 0 || index.count(key)) return;
    lru.emplace_front(key, std::move(body));
    index[key] = lru.begin();
    while (lru.size() > capacity) {
      index.erase(lru.back().first);
      lru.pop_back();
    }
  }
};

Server::Server(std::size_t cache_capacity) : impl_(std::make_unique<Impl>()) {
  impl_->capacity = cache_capacity;
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = handle(req.path, req.params);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  impl_->http.Get("/api/meta", route);
  impl_->http.Get("/api/graph", route);
  impl_->http.Get("/api/edge", route);
}

Server::~Server() { stop(); }

void Server::load(const TreeDocument& left, const TreeDocument& right) {
  auto service = std::make_shared<const ComparisonService>(left, right);
  std::lock_guard lock(impl_->mutex);
  impl_->service = std::move(service);
  impl_->lru.clear();
  impl_->index.clear();
}

bool Server::loaded() const { return impl_->current() != nullptr; }

void Server::set_static_dir(const std::filesystem::path& dir) {
  if (!impl_->http.set_mount_point("/", dir.string()))
    throw Error(Errc::IoError, "cannot serve static files from " + dir.string());
}

HttpResponse Server::handle(const std::string& path, const QueryParams& params) const {
  const auto service = impl_->current();
  if (path != "/api/meta" && path != "/api/graph" && path != "/api/edge") return error_response(404, "no such endpoint");
  if (!service) return error_response(503, "partition trees are not loaded");
  try {
    if (path == "/api/meta") return {200, service->meta().dump(), "application/json"};

    const GraphQuery query = parse_query(params, service->left_tree(), service->right_tree());
    if (path == "/api/graph") {
      const std::string key = cache_key(query);
      if (auto body = impl_->cached(key)) return {200, *body, "application/json"};
      auto body = std::make_shared<const std::string>(service->graph(query).dump());
      impl_->remember(key, body);
      return {200, *body, "application/json"};
    }

    const long long left = integer_param(params, "left", std::nullopt);
    const long long right = integer_param(params, "right", std::nullopt);
    if (left < 0 || right < 0) return error_response(404, "no such edge");
    Json j;
    j["left"] = left;
    j["right"] = right;
    const auto labels = service->edge_members(query, static_cast<std::size_t>(left), static_cast<std::size_t>(right));
    j["weight"] = labels.size();
    j["labels"] = labels;
    return {200, j.dump(), "application/json"};
  } catch (const BadParameter& bad) {
    return error_response(400, bad.message, bad.field);
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::UnknownEdge: return error_response(404, e.what());
      case Errc::ElementSetMismatch: return error_response(422, e.what());
      case Errc::CanvasTooSmall: return error_response(400, e.what(), "height");
      default: return error_response(400, e.what());
    }
  }
}

int Server::bind_to_any_port(const std::string& host) { return impl_->http.bind_to_any_port(host); }

bool Server::bind(const std::string& host, int port) { return impl_->http.bind_to_port(host, port); }

bool Server::listen_after_bind() { return impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace hcmap
