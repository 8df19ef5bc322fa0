#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vortex/profiling.hpp"

namespace vortex {

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) noexcept { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data[r * cols + c]; }
  [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept { return {data.data() + r * cols, cols}; }
};

struct StandardizedMatrix {
  Matrix matrix;
  std::vector<std::string> zero_variance;  // attributes mapped to all zeros
};

// Per-attribute z-scores (population stddev). Throws ValidationError with
// fewer than two profiles or an unknown attribute name.
StandardizedMatrix standardize(std::span<const VortexProfile> profiles, std::span<const std::string> attributes);

struct TsneParams {
  double perplexity = 12.0;
  std::uint64_t seed = 0;
  int iterations = 1000;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
  double learning_rate = 0.0;  // <= 0 selects max(N / exaggeration / 4, 50)
};

// Exact t-SNE to 2D. Deterministic for a given seed; each point's initial
// position depends only on the seed and that row's contents. When `kl_trace`
// is given, the KL divergence after every iteration is appended to it.
// Throws ValidationError for fewer than 5 points or perplexity >= (N-1)/3.
Matrix embed_2d(const Matrix& x, const TsneParams& params, std::vector<double>* kl_trace = nullptr);

inline constexpr int kNoise = -1;

// Density clustering (neighbourhoods include the point itself, distance <= eps).
// Labels are 0.. in discovery order; noise is -1.
std::vector<int> dbscan(const Matrix& points, double eps, std::size_t min_pts);

// eps from the elbow of the sorted k-distance curve (k-th nearest neighbour,
// excluding the point itself).
double k_distance_eps(const Matrix& points, std::size_t k);

enum class ClusterScope { AllLeaves, HairpinCandidates };

struct ClusterRequest {
  std::vector<std::string> attributes;
  double perplexity = 12.0;
  std::uint64_t seed = 0;
  std::optional<double> eps;
  std::size_t min_pts = 4;
  ClusterScope scope = ClusterScope::AllLeaves;
  int iterations = 1000;

  // Throws ValidationError naming the violated constraint for `n_points`.
  void validate(std::size_t n_points) const;
};

struct ClusterResult {
  std::vector<std::int64_t> ids;
  Matrix coords;
  std::vector<int> labels;
  int cluster_count = 0;
  double eps = 0.0;
};

// Standardize -> embed -> cluster over the profiles in scope. For the
// hairpin scope only profiles whose id is in candidate_ids take part.
ClusterResult run_cluster_request(std::span<const VortexProfile> profiles, const ClusterRequest& request,
                                  std::span<const std::int64_t> candidate_ids = {});

// Attribute presets: "couette" and "benard". Throws ValidationError otherwise.
std::vector<std::string> preset_attributes(std::string_view name);

}  // namespace vortex
