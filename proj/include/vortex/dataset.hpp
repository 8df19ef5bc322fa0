#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

#include <json.hpp>

#include "vortex/field_core.hpp"

namespace vortex {

enum class Precision { Float32, Float64 };
enum class ByteOrder { Little, Big };

// Describes a raw interleaved velocity file: 3 components per vertex,
// x-fastest vertex order.
struct DatasetDescriptor {
  std::filesystem::path path;
  GridMeta meta;
  std::array<int, 3> component_order{0, 1, 2};  // file component c holds velocity axis component_order[c]
  Precision precision = Precision::Float32;
  ByteOrder byte_order = ByteOrder::Little;

  [[nodiscard]] std::size_t expected_bytes() const noexcept;

  // Relative `path` entries are resolved against `base_dir`.
  static DatasetDescriptor from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static DatasetDescriptor load(const std::filesystem::path& descriptor_file);
  [[nodiscard]] nlohmann::json to_json() const;
};

// Reads and validates the raw file. Throws ValidationError on a size
// mismatch (expected vs actual bytes) or a non-finite value (naming the first
// offending value index).
std::pair<GridMeta, VelocityField> load_field(const DatasetDescriptor& descriptor);

// Writes `vel` in the descriptor's layout.
void write_field(const DatasetDescriptor& descriptor, const VelocityField& vel);

// FNV-1a 64-bit digest, hex encoded.
std::string fnv1a_hex(const void* data, std::size_t size, std::uint64_t seed = 14695981039346656037ULL);

// Digest of the descriptor layout plus the raw file contents.
std::string dataset_digest(const DatasetDescriptor& descriptor);

nlohmann::json grid_meta_to_json(const GridMeta& meta);
GridMeta grid_meta_from_json(const nlohmann::json& j);

}  // namespace vortex
