#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vortex/geometry.hpp"

namespace vortex {

inline constexpr std::size_t kFeatureCount = 19;

// Feature order of a vortex profile; names double as CSV/JSON keys.
enum class Feature : std::size_t {
  Lambda2, LambdaCi, Q, Delta, Divergence, OmegaYPrime, Size, Vorticity, Enstrophy, Velocity, Acceleration,
  Jacobian, Curvature, HairpinCurvature, StreamwiseDir, SpanwiseDir, VerticalDir, Length, BboxRatio
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "lambda2", "lambda_ci", "Q", "Delta", "Div", "Oyf", "Size", "vorticity", "enstrophy", "velocity",
    "acceleration", "jacobian", "C", "C_h_tilde", "S_t", "S_p", "S_v", "L", "rho"};

// Index of a feature name; std::nullopt if unknown.
std::optional<std::size_t> feature_index(std::string_view name);

struct VortexProfile {
  std::int64_t id = 0;
  std::optional<std::int64_t> parent_id;
  std::array<double, kFeatureCount> values{};

  [[nodiscard]] double operator[](Feature f) const noexcept { return values[static_cast<std::size_t>(f)]; }
  double& operator[](Feature f) noexcept { return values[static_cast<std::size_t>(f)]; }
};

// Vertices touched by at least one region cell, each once, ascending.
std::vector<std::size_t> region_vertices(const CellField& cells, const VortexRegion& region);

// Volume-averaged physical features over the region's vertices, Size, and the
// geometric features; c_h_tilde comes from the hairpin filter.
VortexProfile build_profile(const VortexRegion& region, const FieldSet& fields, const GeometricFeatures& geometry,
                            double c_h_tilde);

struct FeatureStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::int64_t argmin = 0;
  std::int64_t argmax = 0;
};

// Per-feature statistics; ties in argmin/argmax go to the lowest id.
// Throws ValidationError on empty input.
std::array<FeatureStats, kFeatureCount> profile_statistics(std::span<const VortexProfile> profiles);

// CSV with columns id, parent_id and the 19 features; rows in id order.
std::string profiles_to_csv(std::span<const VortexProfile> profiles);

// Shortest round-trip text form of a double.
std::string format_double(double v);

}  // namespace vortex
