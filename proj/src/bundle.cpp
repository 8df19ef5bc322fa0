#include "vortex/bundle.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vortex/errors.hpp"

namespace vortex {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class ByteWriter {
 public:
  template <typename T>
  void put(T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    out_.append(reinterpret_cast<const char*>(b), sizeof(T));
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view bytes, const char* what) : bytes_(bytes), what_(what) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw ValidationError(std::string("truncated ") + what_);
    unsigned char b[sizeof(T)];
    std::memcpy(b, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
  // Guards count fields against absurd values before allocating.
  std::uint32_t count(std::size_t item_bytes) {
    const auto n = get<std::uint32_t>();
    if (static_cast<std::size_t>(n) * item_bytes > bytes_.size() - pos_)
      throw ValidationError(std::string("truncated ") + what_);
    return n;
  }
  void finish() const {
    if (pos_ != bytes_.size()) throw ValidationError(std::string("trailing bytes in ") + what_);
  }

 private:
  std::string_view bytes_;
  const char* what_;
  std::size_t pos_ = 0;
};

json bbox_to_json(const BBox& b) { return json{{"min", b.min}, {"max", b.max}}; }

json opt_json(const std::optional<std::int64_t>& v) { return v ? json(*v) : json(nullptr); }

template <typename T>
std::optional<T> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

}  // namespace

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& p, std::string_view bytes) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + p.string());
}

std::string dump_json(const json& j) { return j.dump(1) + "\n"; }

const BundleNode* ExportBundle::node(std::int64_t id) const noexcept {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes.size()) return nullptr;
  return &nodes[static_cast<std::size_t>(id)];
}

const VortexProfile* ExportBundle::profile(std::int64_t id) const noexcept {
  const auto it = std::lower_bound(profiles.begin(), profiles.end(), id,
                                   [](const VortexProfile& p, std::int64_t v) { return p.id < v; });
  return it != profiles.end() && it->id == id ? &*it : nullptr;
}

std::vector<BundleNode> bundle_nodes(const VortexTree& tree, std::span<const VortexProfile> profiles) {
  std::vector<BundleNode> out;
  out.reserve(tree.nodes.size());
  for (const auto& n : tree.nodes) {
    BundleNode b;
    b.id = n.id;
    b.parent = n.parent;
    b.children = n.children;
    b.level = n.level;
    b.split_iso = n.split_iso;
    b.size = n.region.cells.size();
    b.bbox = n.region.bbox;
    b.diag_len = n.region.diag_len;
    out.push_back(std::move(b));
  }
  for (const auto& p : profiles)
    if (p.id >= 0 && static_cast<std::size_t>(p.id) < out.size()) out[static_cast<std::size_t>(p.id)].has_profile = true;
  return out;
}

std::string encode_mesh(const SurfaceMesh& mesh) {
  ByteWriter w;
  w.put(static_cast<std::uint32_t>(mesh.vertices.size()));
  for (const auto& v : mesh.vertices)
    for (double c : v) w.put(static_cast<float>(c));
  w.put(static_cast<std::uint32_t>(mesh.triangles.size()));
  for (const auto& t : mesh.triangles)
    for (auto i : t) w.put(i);
  return w.take();
}

SurfaceMesh decode_mesh(std::string_view bytes) {
  ByteReader r(bytes, "mesh");
  SurfaceMesh m;
  m.vertices.resize(r.count(12));
  for (auto& v : m.vertices)
    for (auto& c : v) c = r.get<float>();
  m.triangles.resize(r.count(12));
  for (auto& t : m.triangles)
    for (auto& i : t) {
      i = r.get<std::uint32_t>();
      if (i >= m.vertices.size()) throw ValidationError("mesh index out of range");
    }
  r.finish();
  return m;
}

std::string encode_skeleton(const Skeleton& sk) {
  ByteWriter w;
  w.put(static_cast<std::uint32_t>(sk.nodes.size()));
  for (const auto& n : sk.nodes) {
    for (double c : n.position) w.put(c);
    w.put(n.omega_y_prime);
  }
  w.put(static_cast<std::uint32_t>(sk.edges.size()));
  for (const auto& [a, b] : sk.edges) {
    w.put(a);
    w.put(b);
  }
  w.put(static_cast<std::uint32_t>(sk.main_path.size()));
  for (auto i : sk.main_path) w.put(i);
  w.put(static_cast<std::uint8_t>(sk.degenerate ? 1 : 0));
  return w.take();
}

Skeleton decode_skeleton(std::string_view bytes) {
  ByteReader r(bytes, "skeleton");
  Skeleton sk;
  sk.nodes.resize(r.count(32));
  for (auto& n : sk.nodes) {
    for (auto& c : n.position) c = r.get<double>();
    n.omega_y_prime = r.get<double>();
  }
  sk.edges.resize(r.count(8));
  for (auto& [a, b] : sk.edges) {
    a = r.get<std::uint32_t>();
    b = r.get<std::uint32_t>();
    if (a >= sk.nodes.size() || b >= sk.nodes.size()) throw ValidationError("skeleton edge out of range");
  }
  sk.main_path.resize(r.count(4));
  for (auto& i : sk.main_path) {
    i = r.get<std::uint32_t>();
    if (i >= sk.nodes.size()) throw ValidationError("skeleton path index out of range");
  }
  sk.degenerate = r.get<std::uint8_t>() != 0;
  r.finish();
  return sk;
}

json tree_to_json(std::span<const BundleNode> nodes) {
  json arr = json::array();
  for (const auto& n : nodes) {
    arr.push_back({{"id", n.id},
                   {"parent", opt_json(n.parent)},
                   {"children", n.children},
                   {"level", n.level},
                   {"split_iso", n.split_iso ? json(*n.split_iso) : json(nullptr)},
                   {"size", n.size},
                   {"bbox", bbox_to_json(n.bbox)},
                   {"diag_len", n.diag_len},
                   {"leaf", n.children.empty()},
                   {"profile", n.has_profile}});
  }
  json roots = json::array();
  for (const auto& n : nodes)
    if (!n.parent) roots.push_back(n.id);
  return json{{"roots", roots}, {"nodes", arr}};
}

std::vector<BundleNode> tree_from_json(const json& j) {
  std::vector<BundleNode> out;
  for (const auto& e : j.at("nodes")) {
    BundleNode n;
    n.id = e.at("id").get<std::int64_t>();
    n.parent = opt_from<std::int64_t>(e.at("parent"));
    n.children = e.at("children").get<std::vector<std::int64_t>>();
    n.level = e.at("level").get<int>();
    n.split_iso = opt_from<double>(e.at("split_iso"));
    n.size = e.at("size").get<std::size_t>();
    n.bbox.min = e.at("bbox").at("min").get<Vec3>();
    n.bbox.max = e.at("bbox").at("max").get<Vec3>();
    n.diag_len = e.at("diag_len").get<double>();
    n.has_profile = e.at("profile").get<bool>();
    if (n.id != static_cast<std::int64_t>(out.size())) throw ValidationError("tree node ids must be 0..n-1 in order");
    out.push_back(std::move(n));
  }
  return out;
}

json profiles_to_json(std::span<const VortexProfile> profiles) {
  json rows = json::array();
  for (const auto& p : profiles) {
    json vals = json::object();
    for (std::size_t f = 0; f < kFeatureCount; ++f) vals[std::string(kFeatureNames[f])] = p.values[f];
    rows.push_back({{"id", p.id}, {"parent_id", opt_json(p.parent_id)}, {"features", vals}});
  }
  json names = json::array();
  for (auto n : kFeatureNames) names.push_back(std::string(n));
  return json{{"feature_names", names}, {"profiles", rows}};
}

std::vector<VortexProfile> profiles_from_json(const json& j) {
  std::vector<VortexProfile> out;
  for (const auto& e : j.at("profiles")) {
    VortexProfile p;
    p.id = e.at("id").get<std::int64_t>();
    p.parent_id = opt_from<std::int64_t>(e.at("parent_id"));
    const auto& vals = e.at("features");
    for (std::size_t f = 0; f < kFeatureCount; ++f) p.values[f] = vals.at(std::string(kFeatureNames[f])).get<double>();
    out.push_back(p);
  }
  return out;
}

json hairpin_to_json(std::span<const HairpinScores> scores) {
  json rows = json::array();
  json candidates = json::array();
  for (const auto& s : scores) {
    rows.push_back({{"id", s.vortex_id},
                    {"rms_oy", s.rms_oy},
                    {"c_h", s.c_h},
                    {"c_h_tilde", s.c_h_tilde},
                    {"step1", s.passed_step1},
                    {"step2", s.passed_step2},
                    {"step3", s.passed_step3},
                    {"is_candidate", s.is_candidate}});
    if (s.is_candidate) candidates.push_back(s.vortex_id);
  }
  return json{{"candidates", candidates}, {"scores", rows}};
}

std::vector<HairpinScores> hairpin_from_json(const json& j) {
  std::vector<HairpinScores> out;
  for (const auto& e : j.at("scores")) {
    HairpinScores s;
    s.vortex_id = e.at("id").get<std::int64_t>();
    s.rms_oy = e.at("rms_oy").get<double>();
    s.c_h = e.at("c_h").get<double>();
    s.c_h_tilde = e.at("c_h_tilde").get<double>();
    s.passed_step1 = e.at("step1").get<bool>();
    s.passed_step2 = e.at("step2").get<bool>();
    s.passed_step3 = e.at("step3").get<bool>();
    s.is_candidate = e.at("is_candidate").get<bool>();
    out.push_back(s);
  }
  return out;
}

json skeleton_to_json(std::int64_t id, const Skeleton& sk) {
  json points = json::array();
  json samples = json::array();
  for (auto i : sk.main_path) {
    points.push_back(sk.nodes[i].position);
    samples.push_back(sk.nodes[i].omega_y_prime);
  }
  json nodes = json::array();
  for (const auto& n : sk.nodes) nodes.push_back(n.position);
  json edges = json::array();
  for (const auto& [a, b] : sk.edges) edges.push_back({a, b});
  return json{{"id", id},       {"points", points}, {"omega_y_prime", samples},
              {"nodes", nodes}, {"edges", edges},   {"degenerate", sk.degenerate}};
}

json cluster_result_to_json(const ClusterResult& r) {
  json coords = json::array();
  for (std::size_t i = 0; i < r.coords.rows; ++i) coords.push_back({r.coords(i, 0), r.coords(i, 1)});
  return json{{"ids", r.ids},
              {"coords", coords},
              {"labels", r.labels},
              {"cluster_count", r.cluster_count},
              {"eps", r.eps}};
}

ClusterResult cluster_result_from_json(const json& j) {
  ClusterResult r;
  r.ids = j.at("ids").get<std::vector<std::int64_t>>();
  const auto& coords = j.at("coords");
  r.coords = Matrix(coords.size(), 2);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    r.coords(i, 0) = coords[i].at(0).get<double>();
    r.coords(i, 1) = coords[i].at(1).get<double>();
  }
  r.labels = j.at("labels").get<std::vector<int>>();
  r.cluster_count = j.at("cluster_count").get<int>();
  r.eps = j.at("eps").get<double>();
  return r;
}

ClusterRequest cluster_request_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("cluster request must be a JSON object");
  ClusterRequest r;
  try {
    if (!j.contains("attributes") || !j["attributes"].is_array())
      throw ValidationError("attributes must be an array of feature names");
    r.attributes = j["attributes"].get<std::vector<std::string>>();
    r.perplexity = j.value("perplexity", r.perplexity);
    r.seed = j.value("seed", r.seed);
    if (j.contains("eps") && !j["eps"].is_null()) r.eps = j["eps"].get<double>();
    if (j.contains("min_pts")) {
      const auto m = j["min_pts"].get<std::int64_t>();
      if (m < 1) throw ValidationError("min_pts must be >= 1");
      r.min_pts = static_cast<std::size_t>(m);
    }
    r.iterations = j.value("iterations", r.iterations);
    const std::string scope = j.value("scope", std::string("all"));
    if (scope == "all") r.scope = ClusterScope::AllLeaves;
    else if (scope == "hairpin") r.scope = ClusterScope::HairpinCandidates;
    else throw ValidationError("scope must be 'all' or 'hairpin'");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed cluster request: ") + e.what());
  }
  return r;
}

json cluster_request_to_json(const ClusterRequest& r) {
  return json{{"attributes", r.attributes},
              {"perplexity", r.perplexity},
              {"seed", r.seed},
              {"eps", r.eps ? json(*r.eps) : json(nullptr)},
              {"min_pts", r.min_pts},
              {"scope", r.scope == ClusterScope::AllLeaves ? "all" : "hairpin"},
              {"iterations", r.iterations}};
}

void write_bundle(const ExportBundle& b, const fs::path& dir) {
  fs::create_directories(dir);
  fs::remove_all(dir / "meshes");
  fs::remove_all(dir / "skeletons");
  fs::remove(dir / "clusters.json");
  write_file(dir / "manifest.json", dump_json(b.manifest));
  write_file(dir / "tree.json", dump_json(tree_to_json(b.nodes)));
  write_file(dir / "profiles.json", dump_json(profiles_to_json(b.profiles)));
  write_file(dir / "profiles.csv", profiles_to_csv(b.profiles));
  write_file(dir / "hairpin.json", dump_json(hairpin_to_json(b.hairpin)));
  write_file(dir / "hairpin.csv", hairpin_to_csv(b.hairpin));
  if (b.clusters) write_file(dir / "clusters.json", dump_json(*b.clusters));
  fs::create_directories(dir / "meshes");
  fs::create_directories(dir / "skeletons");
  for (const auto& [id, mesh] : b.meshes) write_file(dir / "meshes" / (std::to_string(id) + ".mesh"), encode_mesh(mesh));
  for (const auto& [id, sk] : b.skeletons)
    write_file(dir / "skeletons" / (std::to_string(id) + ".skel"), encode_skeleton(sk));
}

namespace {

json parse_json_file(const fs::path& p) {
  try {
    return json::parse(read_file(p));
  } catch (const json::exception& e) {
    throw ValidationError(p.string() + ": " + e.what());
  }
}

}  // namespace

ExportBundle load_bundle(const fs::path& dir) {
  ExportBundle b;
  b.manifest = parse_json_file(dir / "manifest.json");
  if (!b.manifest.contains("schema_version") || !b.manifest["schema_version"].is_number_integer())
    throw ValidationError("bundle manifest has no integer schema_version");
  const int version = b.manifest["schema_version"].get<int>();
  if (version != kBundleSchemaVersion)
    throw ValidationError("unsupported bundle schema_version " + std::to_string(version) + " (this build reads " +
                          std::to_string(kBundleSchemaVersion) + ")");
  try {
    b.nodes = tree_from_json(parse_json_file(dir / "tree.json"));
    b.profiles = profiles_from_json(parse_json_file(dir / "profiles.json"));
    b.hairpin = hairpin_from_json(parse_json_file(dir / "hairpin.json"));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed bundle: ") + e.what());
  }
  if (fs::exists(dir / "clusters.json")) b.clusters = parse_json_file(dir / "clusters.json");
  for (const auto& p : b.profiles) {
    if (!b.node(p.id)) throw ValidationError("profile id " + std::to_string(p.id) + " is not a tree node");
    const fs::path mesh = dir / "meshes" / (std::to_string(p.id) + ".mesh");
    const fs::path skel = dir / "skeletons" / (std::to_string(p.id) + ".skel");
    if (fs::exists(mesh)) b.meshes.emplace(p.id, decode_mesh(read_file(mesh)));
    if (fs::exists(skel)) b.skeletons.emplace(p.id, decode_skeleton(read_file(skel)));
  }
  for (const auto& s : b.hairpin)
    if (!b.node(s.vortex_id)) throw ValidationError("hairpin score id " + std::to_string(s.vortex_id) + " is not a tree node");
  if (!std::is_sorted(b.profiles.begin(), b.profiles.end(),
                      [](const VortexProfile& x, const VortexProfile& y) { return x.id < y.id; }))
    throw ValidationError("profiles must be in ascending id order");
  return b;
}

}  // namespace vortex
