#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vortex/field_core.hpp"

namespace vortex {

using CellId = std::size_t;

// Cell-level view of a vertex scalar (lambda2 by default). A cell's value is
// the minimum of its 8 vertices, so "cell has a vertex below iso" is
// equivalent to cell_min < iso.
struct CellField {
  GridMeta meta;
  std::array<std::size_t, 3> cdims{};
  std::vector<double> cell_min;

  static CellField from_vertices(const GridMeta& meta, std::span<const double> vertex_values);

  [[nodiscard]] std::size_t count() const noexcept { return cell_min.size(); }
  [[nodiscard]] CellId linear(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return i + cdims[0] * (j + cdims[1] * k);
  }
  [[nodiscard]] Index3 unlinear(CellId c) const noexcept {
    return {c % cdims[0], (c / cdims[0]) % cdims[1], c / (cdims[0] * cdims[1])};
  }
  [[nodiscard]] Vec3 center(CellId c) const noexcept;
};

struct BBox {
  Vec3 min{};
  Vec3 max{};
  [[nodiscard]] double diagonal() const noexcept { return distance(min, max); }
};

// World-space box spanned by a set of cells (outer cell corners).
BBox cells_bbox(const CellField& field, std::span<const CellId> cells);

struct VortexRegion {
  std::int64_t id = -1;
  std::vector<CellId> cells;  // sorted ascending, unique
  BBox bbox;
  double diag_len = 0.0;

  static VortexRegion from_cells(std::int64_t id, std::vector<CellId> cells, const CellField& field);
};

// 6-face-connected components of a cell set, each sorted, ordered by their
// smallest cell id.
std::vector<std::vector<CellId>> connected_components(const CellField& field, std::span<const CellId> cells);

// Cells whose value is the strict local minimum of their 3x3x3 neighbourhood
// (ties go to the lower linear index), restricted to cells with
// cell_min < lambda2_init. Returned in ascending cell order.
std::vector<CellId> find_seed_cells(const CellField& field, double lambda2_init);

// Breadth-first growth over face neighbours with cell_min < lambda2_init.
VortexRegion grow_region(const CellField& field, CellId seed, double lambda2_init, std::int64_t id = 0);

// Grows from every seed (strongest first), skipping seeds already absorbed,
// and drops regions smaller than noise_frac of all cells. Ids are 0..n-1 in
// growth order.
std::vector<VortexRegion> extract_all_regions(const CellField& field, double lambda2_init, double noise_frac = 1e-4);

struct IsoComponent {
  int color = 0;
  std::vector<CellId> cells;
  BBox bbox;
  double diag_len = 0.0;
};

// Face-connected components of {c in region : cell_min[c] < iso}; components
// below min_comp_frac of all grid cells are discarded.
std::vector<IsoComponent> isosurface_components(const CellField& field, const VortexRegion& region, double iso,
                                                double min_comp_frac = 1e-4);

// Minimum local length ratio L_r a component needs to survive the vortex size
// factor gate. The global ratio G_r enters as a percentage.
double vsf_min_local_ratio(double region_diag, double domain_diag, double vsf);

// Splits `region` among the components surviving the VSF gate. Returns an
// empty vector when fewer than two survive (no split). Otherwise every cell
// goes to the component with the nearest cell centre (ties: lower colour) and
// each colour's cells become one child per face-connected fragment.
std::vector<VortexRegion> split_region(const CellField& field, const VortexRegion& region,
                                       std::span<const IsoComponent> components, double domain_diag,
                                       double vsf = 3.5);

struct TreeNode {
  std::int64_t id = 0;
  VortexRegion region;
  std::optional<std::int64_t> parent;
  std::vector<std::int64_t> children;
  std::optional<double> split_iso;
  int level = 0;  // 0 for roots, k+1 for nodes created by lambda2_steps[k]

  [[nodiscard]] bool is_leaf() const noexcept { return children.empty(); }
};

struct VortexTree {
  std::vector<TreeNode> nodes;  // nodes[i].id == i

  [[nodiscard]] std::vector<std::int64_t> leaves() const;
  [[nodiscard]] std::vector<std::int64_t> roots() const;
  [[nodiscard]] int depth() const;
};

struct SplitParams {
  double vsf = 3.5;
  double min_comp_frac = 1e-4;
};

// Top-down splitting: every region is a root; for each isovalue (descending)
// every current leaf is split where possible.
VortexTree build_tree(const CellField& field, std::vector<VortexRegion> roots, std::span<const double> steps,
                      const SplitParams& params = {});

struct SimplifyResult {
  VortexRegion region;
  bool emptied = false;  // simplification removed everything; region is the input
};

// Drops cells with fewer than min_nb1 region neighbours (26-neighbourhood),
// then weak cells (value above the region mean) with fewer than min_nb2, and
// keeps the largest face-connected remainder.
SimplifyResult simplify_region(const CellField& field, const VortexRegion& region, int min_nb1 = 6,
                               int min_nb2 = 8);

}  // namespace vortex
