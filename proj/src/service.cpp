#include "vortex/service.hpp"

#include <algorithm>
#include <charconv>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "vortex/errors.hpp"

namespace vortex {

using nlohmann::json;

namespace {

ServiceResponse json_response(const json& j, int status = 200) { return {status, j.dump(), "application/json"}; }

ServiceResponse error_response(int status, const std::string& message) {
  return json_response(json{{"error", message}}, status);
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_real(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

const std::string* query_value(const std::multimap<std::string, std::string>& q, const std::string& key) {
  const auto it = q.find(key);
  return it == q.end() ? nullptr : &it->second;
}

}  // namespace

BundleService::BundleService(ExportBundle bundle, ServiceOptions options)
    : bundle_(std::move(bundle)),
      cluster_slots_(std::clamp<std::ptrdiff_t>(options.cluster_workers, 1, 1024)) {
  for (const auto& s : bundle_.hairpin)
    if (s.is_candidate) candidates_.push_back(s.vortex_id);
}

BundleService::~BundleService() { stop(); }

ServiceResponse BundleService::handle(const std::string& method, const std::string& path,
                                      const std::multimap<std::string, std::string>& query,
                                      const std::string& body) const {
  if (method == "POST") {
    if (path == "/api/cluster") return cluster(body);
    return error_response(404, "no such endpoint: POST " + path);
  }
  if (method != "GET") return error_response(405, "method not allowed");
  if (path == "/api/manifest") return json_response(bundle_.manifest);
  if (path == "/api/tree") return json_response(tree_to_json(bundle_.nodes));
  if (path == "/api/profiles") return json_response(profiles_to_json(bundle_.profiles));
  if (path == "/api/hairpin/candidates") return json_response(hairpin_to_json(bundle_.hairpin));
  if (path == "/api/subtree") return subtree(query);

  constexpr std::string_view prefix = "/api/vortex/";
  if (path.starts_with(prefix)) {
    const std::string_view rest = std::string_view(path).substr(prefix.size());
    const auto slash = rest.find('/');
    if (slash != std::string_view::npos) {
      const auto id = parse_int(rest.substr(0, slash));
      const std::string_view what = rest.substr(slash + 1);
      if (!id) return error_response(400, "vortex id must be an integer");
      if (!bundle_.node(*id)) return error_response(404, "unknown vortex id " + std::to_string(*id));
      if (what == "mesh") {
        const auto it = bundle_.meshes.find(*id);
        if (it == bundle_.meshes.end()) return error_response(404, "no mesh stored for vortex " + std::to_string(*id));
        return {200, encode_mesh(it->second), "application/octet-stream"};
      }
      if (what == "skeleton") {
        const auto it = bundle_.skeletons.find(*id);
        if (it == bundle_.skeletons.end())
          return error_response(404, "no skeleton stored for vortex " + std::to_string(*id));
        return json_response(skeleton_to_json(*id, it->second));
      }
    }
  }
  return error_response(404, "no such endpoint: GET " + path);
}

// Descendants of `root` (excluding it) with at least min_size cells, ranked
// by the sort feature (descending, ties by id), truncated to max_nodes. Size
// ranks every node; other features rank nodes that carry a profile.
ServiceResponse BundleService::subtree(const std::multimap<std::string, std::string>& query) const {
  const std::string* root_s = query_value(query, "root");
  if (!root_s) return error_response(400, "root is required");
  const auto root = parse_int(*root_s);
  if (!root) return error_response(400, "root must be an integer");
  if (!bundle_.node(*root)) return error_response(404, "unknown vortex id " + std::to_string(*root));

  std::int64_t max_nodes = std::numeric_limits<std::int64_t>::max();
  if (const auto* s = query_value(query, "max_nodes")) {
    const auto v = parse_int(*s);
    if (!v || *v < 1) return error_response(400, "max_nodes must be a positive integer");
    max_nodes = *v;
  }
  double min_size = 0.0;
  if (const auto* s = query_value(query, "min_size")) {
    const auto v = parse_real(*s);
    if (!v || *v < 0.0) return error_response(400, "min_size must be a non-negative number");
    min_size = *v;
  }
  std::string sort = "Size";
  if (const auto* s = query_value(query, "sort")) sort = *s;
  const auto feature = feature_index(sort);
  if (!feature) return error_response(400, "unknown sort feature '" + sort + "'");
  const bool by_size = *feature == static_cast<std::size_t>(Feature::Size);

  struct Item {
    std::int64_t id;
    double value;
  };
  std::vector<Item> items;
  std::vector<std::int64_t> stack = bundle_.node(*root)->children;
  while (!stack.empty()) {
    const std::int64_t id = stack.back();
    stack.pop_back();
    const BundleNode* n = bundle_.node(id);
    stack.insert(stack.end(), n->children.begin(), n->children.end());
    if (static_cast<double>(n->size) < min_size) continue;
    if (by_size) {
      items.push_back({id, static_cast<double>(n->size)});
    } else if (const VortexProfile* p = bundle_.profile(id)) {
      items.push_back({id, p->values[*feature]});
    }
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return a.value != b.value ? a.value > b.value : a.id < b.id;
  });
  if (static_cast<std::int64_t>(items.size()) > max_nodes) items.resize(static_cast<std::size_t>(max_nodes));

  json nodes = json::array();
  for (const auto& it : items) {
    const BundleNode* n = bundle_.node(it.id);
    nodes.push_back({{"id", it.id},
                     {"parent", n->parent ? json(*n->parent) : json(nullptr)},
                     {"level", n->level},
                     {"size", n->size},
                     {"leaf", n->children.empty()},
                     {"value", it.value}});
  }
  return json_response(json{{"root", *root}, {"sort", sort}, {"min_size", min_size}, {"nodes", nodes}});
}

ServiceResponse BundleService::cluster(const std::string& body) const {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    return error_response(400, std::string("request body is not JSON: ") + e.what());
  }
  ClusterRequest req;
  try {
    req = cluster_request_from_json(j);
    std::size_t in_scope = bundle_.profiles.size();
    if (req.scope == ClusterScope::HairpinCandidates) in_scope = candidates_.size();
    req.validate(in_scope);
  } catch (const ValidationError& e) {
    return error_response(400, e.what());
  }
  cluster_slots_.acquire();
  try {
    const ClusterResult r = run_cluster_request(bundle_.profiles, req, candidates_);
    cluster_slots_.release();
    json out = cluster_result_to_json(r);
    out["request"] = cluster_request_to_json(req);
    return json_response(out);
  } catch (const ValidationError& e) {
    cluster_slots_.release();
    return error_response(400, e.what());
  } catch (const std::exception& e) {
    cluster_slots_.release();
    return error_response(500, e.what());
  }
}

int BundleService::bind(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  auto adapt = [this](const httplib::Request& req, httplib::Response& res) {
    std::multimap<std::string, std::string> query(req.params.begin(), req.params.end());
    const ServiceResponse r = handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server_->Get(R"(/api/.*)", adapt);
  server_->Post(R"(/api/.*)", adapt);
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

void BundleService::run() {
  if (!server_) throw Error("service is not bound");
  server_->listen_after_bind();
}

void BundleService::stop() {
  if (server_) server_->stop();
}

std::pair<std::string, int> parse_bind_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos) throw ValidationError("bind address must be host:port, got '" + address + "'");
  const auto port = parse_int(std::string_view(address).substr(colon + 1));
  if (!port || *port < 0 || *port > 65535) throw ValidationError("invalid port in '" + address + "'");
  return {address.substr(0, colon), static_cast<int>(*port)};
}

void serve(const std::filesystem::path& bundle_path, const std::string& bind_address, ServiceOptions options) {
  const auto [host, port] = parse_bind_address(bind_address);
  BundleService service(load_bundle(bundle_path), options);
  const int bound = service.bind(host, port);
  if (bound < 0) throw Error("cannot bind " + bind_address);
  spdlog::info("serving {} on {}:{}", bundle_path.string(), host, bound);
  service.run();
}

}  // namespace vortex
