#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vortex/types.hpp"

namespace vortex {

// Which grid axis carries each physical flow direction.
struct AxisRoles {
  int streamwise = 0;
  int spanwise = 1;
  int vertical = 2;

  [[nodiscard]] bool is_bijection() const noexcept;
  friend bool operator==(const AxisRoles&, const AxisRoles&) = default;
};

// Structured vertex grid. Vertex (i, j, k) lives at linear index
// i + j*nx + k*nx*ny and world position origin + (i, j, k) * spacing.
struct GridMeta {
  std::array<std::size_t, 3> dims{2, 2, 2};
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin{0.0, 0.0, 0.0};
  AxisRoles axis_roles{};

  // Throws ValidationError on dims < 2, non-positive spacing or a bad role map.
  void validate() const;

  [[nodiscard]] std::size_t vertex_count() const noexcept { return dims[0] * dims[1] * dims[2]; }
  [[nodiscard]] std::size_t linear(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return i + dims[0] * (j + dims[1] * k);
  }
  [[nodiscard]] std::size_t linear(const Index3& v) const noexcept { return linear(v.i, v.j, v.k); }
  [[nodiscard]] Index3 unlinear(std::size_t idx) const noexcept {
    return {idx % dims[0], (idx / dims[0]) % dims[1], idx / (dims[0] * dims[1])};
  }
  [[nodiscard]] Vec3 position(const Index3& v) const noexcept {
    return {origin[0] + static_cast<double>(v.i) * spacing[0],
            origin[1] + static_cast<double>(v.j) * spacing[1],
            origin[2] + static_cast<double>(v.k) * spacing[2]};
  }
  [[nodiscard]] Vec3 extent_max() const noexcept {
    return {origin[0] + static_cast<double>(dims[0] - 1) * spacing[0],
            origin[1] + static_cast<double>(dims[1] - 1) * spacing[1],
            origin[2] + static_cast<double>(dims[2] - 1) * spacing[2]};
  }
  [[nodiscard]] double domain_diagonal() const noexcept { return distance(origin, extent_max()); }

  // Cell (voxel) grid: one fewer than the vertex count along each axis.
  [[nodiscard]] std::array<std::size_t, 3> cell_dims() const noexcept {
    return {dims[0] - 1, dims[1] - 1, dims[2] - 1};
  }
  [[nodiscard]] std::size_t cell_count() const noexcept {
    const auto c = cell_dims();
    return c[0] * c[1] * c[2];
  }
};

struct VelocityField {
  std::vector<Vec3> data;
};

// Velocity snapshot plus every derived per-vertex quantity. Immutable once
// built by compute_criteria; safe to share read-only across threads.
struct FieldSet {
  GridMeta meta;
  VelocityField velocity;
  std::vector<double> lambda2;
  std::vector<double> q;
  std::vector<double> delta;
  std::vector<double> lambda_ci;
  std::vector<double> divergence;
  std::vector<double> enstrophy;
  std::vector<double> omega_y_prime;
  std::vector<double> speed;
  std::vector<double> accel_mag;
  std::vector<double> jacobian_norm;
  std::vector<Vec3> vorticity;
};

// Velocity gradient J[i][j] = dv_i/dx_j. Central differences in the interior,
// one-sided first-order differences on boundary vertices.
// Throws std::out_of_range when `vertex` is outside the grid.
Mat3 compute_jacobian(const GridMeta& meta, const VelocityField& vel, const Index3& vertex);

// Pointwise quantities derived from one velocity gradient and velocity.
struct PointCriteria {
  double q = 0.0;
  double delta = 0.0;
  double lambda2 = 0.0;
  std::array<double, 3> s2_omega2_eigenvalues{};  // descending
  double lambda_ci = 0.0;
  double divergence = 0.0;
  Vec3 vorticity{};
  double enstrophy = 0.0;
  Vec3 acceleration{};
};
PointCriteria evaluate_point(const Mat3& jacobian, const Vec3& velocity);

// Full derived field set. Validates the grid and that every velocity component
// is finite (ValidationError naming the offending vertex otherwise).
FieldSet compute_criteria(const GridMeta& meta, const VelocityField& vel);

// Spanwise vorticity minus its mean over each horizontal slab (fixed index
// along the vertical axis). Single-snapshot approximation of the fluctuation.
std::vector<double> compute_omega_y_prime(const GridMeta& meta, std::span<const Vec3> vorticity);

// Trilinear interpolation of a vertex scalar at a world position (clamped to
// the grid).
double sample_trilinear(const GridMeta& meta, std::span<const double> field, const Vec3& p);

}  // namespace vortex
