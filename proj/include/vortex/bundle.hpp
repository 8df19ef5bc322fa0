#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vortex/clustering.hpp"
#include "vortex/geometry.hpp"
#include "vortex/hairpin.hpp"
#include "vortex/profiling.hpp"
#include "vortex/regions.hpp"

namespace vortex {

inline constexpr int kBundleSchemaVersion = 1;

// Tree node as stored in a bundle (no cell lists).
struct BundleNode {
  std::int64_t id = 0;
  std::optional<std::int64_t> parent;
  std::vector<std::int64_t> children;
  int level = 0;
  std::optional<double> split_iso;
  std::size_t size = 0;  // cell count
  BBox bbox;
  double diag_len = 0.0;
  bool has_profile = false;
};

std::vector<BundleNode> bundle_nodes(const VortexTree& tree, std::span<const VortexProfile> profiles);

struct ExportBundle {
  nlohmann::json manifest;
  std::vector<BundleNode> nodes;
  std::vector<VortexProfile> profiles;  // ascending id
  std::vector<HairpinScores> hairpin;   // same order as profiles
  std::optional<nlohmann::json> clusters;
  std::map<std::int64_t, SurfaceMesh> meshes;
  std::map<std::int64_t, Skeleton> skeletons;

  [[nodiscard]] const BundleNode* node(std::int64_t id) const noexcept;
  [[nodiscard]] const VortexProfile* profile(std::int64_t id) const noexcept;
};

// Binary sidecars, little-endian.
// mesh:     u32 V, f32 xyz * V, u32 T, u32 index * 3T
// skeleton: u32 N, f64 (x, y, z, omega_y') * N, u32 E, u32 pair * E,
//           u32 P, u32 node index * P, u8 degenerate
std::string encode_mesh(const SurfaceMesh& mesh);
SurfaceMesh decode_mesh(std::string_view bytes);
std::string encode_skeleton(const Skeleton& skeleton);
Skeleton decode_skeleton(std::string_view bytes);

nlohmann::json tree_to_json(std::span<const BundleNode> nodes);
std::vector<BundleNode> tree_from_json(const nlohmann::json& j);
nlohmann::json profiles_to_json(std::span<const VortexProfile> profiles);
std::vector<VortexProfile> profiles_from_json(const nlohmann::json& j);
nlohmann::json hairpin_to_json(std::span<const HairpinScores> scores);
std::vector<HairpinScores> hairpin_from_json(const nlohmann::json& j);
nlohmann::json skeleton_to_json(std::int64_t id, const Skeleton& skeleton);
nlohmann::json cluster_result_to_json(const ClusterResult& result);
ClusterResult cluster_result_from_json(const nlohmann::json& j);

// {"attributes": [...], "perplexity", "seed", "eps" (null for automatic),
//  "min_pts", "scope": "all" | "hairpin", "iterations"}. Missing keys take
// defaults; type errors throw ValidationError.
ClusterRequest cluster_request_from_json(const nlohmann::json& j);
nlohmann::json cluster_request_to_json(const ClusterRequest& request);

// Writes manifest.json, tree.json, profiles.json/.csv, hairpin.json/.csv,
// clusters.json (when present), meshes/<id>.mesh and skeletons/<id>.skel.
// Existing bundle files in `dir` are replaced.
void write_bundle(const ExportBundle& bundle, const std::filesystem::path& dir);

// Throws ValidationError for a missing or unknown schema version, a missing
// file, or profile/score ids that are not tree nodes.
ExportBundle load_bundle(const std::filesystem::path& dir);

// Byte helpers shared with the pipeline caches.
std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view bytes);
std::string dump_json(const nlohmann::json& j);

}  // namespace vortex
