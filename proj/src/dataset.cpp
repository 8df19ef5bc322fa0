#include "vortex/dataset.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "vortex/errors.hpp"

namespace vortex {

namespace fs = std::filesystem;
using nlohmann::json;

std::size_t DatasetDescriptor::expected_bytes() const noexcept {
  return meta.vertex_count() * 3 * (precision == Precision::Float32 ? 4 : 8);
}

json grid_meta_to_json(const GridMeta& meta) {
  return json{{"dims", meta.dims},
              {"spacing", meta.spacing},
              {"origin", meta.origin},
              {"axis_roles",
               {{"streamwise", meta.axis_roles.streamwise},
                {"spanwise", meta.axis_roles.spanwise},
                {"vertical", meta.axis_roles.vertical}}}};
}

GridMeta grid_meta_from_json(const json& j) {
  GridMeta m;
  try {
    m.dims = j.at("dims").get<std::array<std::size_t, 3>>();
    m.spacing = j.value("spacing", Vec3{1.0, 1.0, 1.0});
    m.origin = j.value("origin", Vec3{0.0, 0.0, 0.0});
    if (j.contains("axis_roles")) {
      const auto& r = j.at("axis_roles");
      m.axis_roles.streamwise = r.at("streamwise").get<int>();
      m.axis_roles.spanwise = r.at("spanwise").get<int>();
      m.axis_roles.vertical = r.at("vertical").get<int>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("grid description: ") + e.what());
  }
  m.validate();
  return m;
}

DatasetDescriptor DatasetDescriptor::from_json(const json& j, const fs::path& base_dir) {
  DatasetDescriptor d;
  try {
    d.path = j.at("path").get<std::string>();
    if (d.path.is_relative() && !base_dir.empty()) d.path = base_dir / d.path;
    d.meta = grid_meta_from_json(j);
    d.component_order = j.value("component_order", std::array<int, 3>{0, 1, 2});
    const std::string prec = j.value("precision", std::string("float32"));
    if (prec == "float32") d.precision = Precision::Float32;
    else if (prec == "float64") d.precision = Precision::Float64;
    else throw ValidationError("precision must be float32 or float64, got '" + prec + "'");
    const std::string order = j.value("byte_order", std::string("little"));
    if (order == "little") d.byte_order = ByteOrder::Little;
    else if (order == "big") d.byte_order = ByteOrder::Big;
    else throw ValidationError("byte_order must be little or big, got '" + order + "'");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("descriptor: ") + e.what());
  }
  std::array<bool, 3> seen{};
  for (int c : d.component_order) {
    if (c < 0 || c > 2 || seen[c]) throw ValidationError("component_order must be a permutation of 0,1,2");
    seen[c] = true;
  }
  return d;
}

DatasetDescriptor DatasetDescriptor::load(const fs::path& descriptor_file) {
  std::ifstream in(descriptor_file);
  if (!in) throw ValidationError("cannot open descriptor " + descriptor_file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("descriptor " + descriptor_file.string() + ": " + e.what());
  }
  return from_json(j, descriptor_file.parent_path());
}

json DatasetDescriptor::to_json() const {
  json j = grid_meta_to_json(meta);
  j["path"] = path.string();
  j["component_order"] = component_order;
  j["precision"] = precision == Precision::Float32 ? "float32" : "float64";
  j["byte_order"] = byte_order == ByteOrder::Little ? "little" : "big";
  return j;
}

namespace {

bool host_matches(ByteOrder order) {
  return (order == ByteOrder::Little) == (std::endian::native == std::endian::little);
}

template <typename T>
T read_value(const unsigned char* p, bool swap) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, p, sizeof(T));
  if (swap) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

template <typename T>
void write_value(std::vector<unsigned char>& out, T v, bool swap) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if (swap) std::reverse(buf, buf + sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

std::vector<unsigned char> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ValidationError("cannot open velocity file " + p.string());
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

std::pair<GridMeta, VelocityField> load_field(const DatasetDescriptor& d) {
  d.meta.validate();
  const auto bytes = read_bytes(d.path);
  if (bytes.size() != d.expected_bytes()) {
    std::ostringstream os;
    os << "velocity file " << d.path.string() << " has " << bytes.size() << " bytes, expected " << d.expected_bytes()
       << " (" << d.meta.dims[0] << "x" << d.meta.dims[1] << "x" << d.meta.dims[2] << "x3 "
       << (d.precision == Precision::Float32 ? "float32" : "float64") << ")";
    throw ValidationError(os.str());
  }
  const bool swap = !host_matches(d.byte_order);
  const std::size_t width = d.precision == Precision::Float32 ? 4 : 8;
  VelocityField vel;
  vel.data.resize(d.meta.vertex_count());
  for (std::size_t v = 0; v < vel.data.size(); ++v) {
    for (int c = 0; c < 3; ++c) {
      const std::size_t index = v * 3 + static_cast<std::size_t>(c);
      const unsigned char* p = bytes.data() + index * width;
      const double value = width == 4 ? static_cast<double>(read_value<float>(p, swap)) : read_value<double>(p, swap);
      if (!std::isfinite(value)) {
        std::ostringstream os;
        os << "non-finite value at index " << index << " (vertex " << v << ", component " << c << ")";
        throw ValidationError(os.str());
      }
      vel.data[v][d.component_order[c]] = value;
    }
  }
  return {d.meta, std::move(vel)};
}

void write_field(const DatasetDescriptor& d, const VelocityField& vel) {
  if (vel.data.size() != d.meta.vertex_count()) throw ValidationError("velocity length does not match descriptor");
  const bool swap = !host_matches(d.byte_order);
  std::vector<unsigned char> out;
  out.reserve(d.expected_bytes());
  for (const auto& v : vel.data)
    for (int c = 0; c < 3; ++c) {
      const double value = v[d.component_order[c]];
      if (d.precision == Precision::Float32) write_value(out, static_cast<float>(value), swap);
      else write_value(out, value, swap);
    }
  if (d.path.has_parent_path()) fs::create_directories(d.path.parent_path());
  std::ofstream f(d.path, std::ios::binary);
  if (!f) throw ValidationError("cannot write velocity file " + d.path.string());
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

std::string fnv1a_hex(const void* data, std::size_t size, std::uint64_t seed) {
  std::uint64_t h = seed;
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string dataset_digest(const DatasetDescriptor& d) {
  json layout = d.to_json();
  layout.erase("path");
  const std::string text = layout.dump();
  const auto bytes = read_bytes(d.path);
  std::string combined = text;
  combined.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  return fnv1a_hex(combined.data(), combined.size());
}

}  // namespace vortex
