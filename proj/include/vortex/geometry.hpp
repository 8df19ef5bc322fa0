#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "vortex/regions.hpp"

namespace vortex {

struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
};

// Boundary of a cell set: every cell face with exactly one incident region
// cell, as two outward-facing triangles. Vertices are shared grid vertices.
// Regions whose cells touch only along an edge produce non-manifold edges.
SurfaceMesh extract_boundary_surface(const CellField& field, const VortexRegion& region);

// Umbrella-operator smoothing: each vertex moves `factor` of the way toward
// the mean of its 1-ring, all vertices updated simultaneously.
SurfaceMesh laplacian_smooth(SurfaceMesh mesh, int iterations = 10, double factor = 0.5);

// Enclosed volume of a closed, outward-oriented mesh.
double mesh_volume(const SurfaceMesh& mesh);

struct SkeletonNode {
  Vec3 position{};
  double omega_y_prime = 0.0;
};

// Curve skeleton of a region. `nodes`/`edges` form the full thinned graph;
// `main_path` is the ordered, decimated longest geodesic through it.
struct Skeleton {
  std::vector<SkeletonNode> nodes;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::uint32_t> main_path;
  bool degenerate = false;

  [[nodiscard]] std::vector<Vec3> main_path_points() const;
};

struct SkeletonParams {
  double decimate_tolerance_cells = 0.75;  // Douglas-Peucker tolerance
  bool extend_ends = true;                 // march path ends to the region boundary
};

// Topology-preserving thinning of the region's cells (26-connected
// foreground), graph extraction, longest-geodesic main path, end extension
// and straight-run decimation. omega_y_prime is sampled trilinearly at every
// node.
Skeleton skeletonize(const CellField& field, const VortexRegion& region, std::span<const double> omega_y_prime,
                     const SkeletonParams& params = {});

// Voxel thinning only: the surviving cells of `cells`.
std::vector<CellId> thin_cells(const CellField& field, std::span<const CellId> cells);

struct GeometricFeatures {
  double curvature = 0.0;  // C, mean turning angle (radians)
  double s_t = 0.0;
  double s_p = 0.0;
  double s_v = 0.0;
  double length = 0.0;     // L
  double bbox_diag = 0.0;  // oriented bounding box diagonal
  double rho = 0.0;        // L / bbox_diag
  std::size_t n_points = 0;
};

// Shape features of a polyline. Consecutive duplicate points are ignored;
// throws ValidationError when fewer than two distinct points remain.
GeometricFeatures geometric_features(std::span<const Vec3> path, const AxisRoles& roles);

// Diagonal of the PCA-aligned bounding box of a point set.
double oriented_bbox_diagonal(std::span<const Vec3> points);

}  // namespace vortex
