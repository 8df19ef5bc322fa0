#include "vortex/regions.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

#include "cell_box.hpp"
#include "parallel.hpp"
#include "vortex/errors.hpp"

namespace vortex {

using detail::CellBox;
using detail::kFaceOffsets;

CellField CellField::from_vertices(const GridMeta& meta, std::span<const double> vertex_values) {
  meta.validate();
  if (vertex_values.size() != meta.vertex_count()) throw ValidationError("scalar length does not match grid");
  CellField f;
  f.meta = meta;
  f.cdims = meta.cell_dims();
  f.cell_min.assign(meta.cell_count(), 0.0);
  detail::parallel_for(f.cell_min.size(), [&](std::size_t c) {
    const Index3 p = f.unlinear(c);
    double m = std::numeric_limits<double>::infinity();
    for (int corner = 0; corner < 8; ++corner) {
      m = std::min(m, vertex_values[meta.linear(p.i + (corner & 1), p.j + ((corner >> 1) & 1),
                                                p.k + ((corner >> 2) & 1))]);
    }
    f.cell_min[c] = m;
  });
  return f;
}

Vec3 CellField::center(CellId c) const noexcept {
  const Index3 p = unlinear(c);
  return {meta.origin[0] + (static_cast<double>(p.i) + 0.5) * meta.spacing[0],
          meta.origin[1] + (static_cast<double>(p.j) + 0.5) * meta.spacing[1],
          meta.origin[2] + (static_cast<double>(p.k) + 0.5) * meta.spacing[2]};
}

BBox cells_bbox(const CellField& field, std::span<const CellId> cells) {
  if (cells.empty()) return {};
  std::array<std::size_t, 3> mn{SIZE_MAX, SIZE_MAX, SIZE_MAX};
  std::array<std::size_t, 3> mx{0, 0, 0};
  for (CellId c : cells) {
    const Index3 p = field.unlinear(c);
    for (int a = 0; a < 3; ++a) {
      mn[a] = std::min(mn[a], p[a]);
      mx[a] = std::max(mx[a], p[a]);
    }
  }
  BBox b;
  for (int a = 0; a < 3; ++a) {
    b.min[a] = field.meta.origin[a] + static_cast<double>(mn[a]) * field.meta.spacing[a];
    b.max[a] = field.meta.origin[a] + static_cast<double>(mx[a] + 1) * field.meta.spacing[a];
  }
  return b;
}

VortexRegion VortexRegion::from_cells(std::int64_t id, std::vector<CellId> cells, const CellField& field) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  VortexRegion r;
  r.id = id;
  r.bbox = cells_bbox(field, cells);
  r.diag_len = r.bbox.diagonal();
  r.cells = std::move(cells);
  return r;
}

std::vector<std::vector<CellId>> connected_components(const CellField& field, std::span<const CellId> input) {
  std::vector<CellId> cells(input.begin(), input.end());
  std::sort(cells.begin(), cells.end());
  if (cells.empty()) return {};
  const CellBox box = CellBox::around(field, cells);
  std::vector<std::uint8_t> mask = box.mask(field, cells);  // 1 = member, 2 = visited

  std::vector<std::vector<CellId>> out;
  std::vector<std::size_t> queue;
  for (CellId start : cells) {
    const std::size_t s = box.from_global(field, start);
    if (mask[s] != 1) continue;
    mask[s] = 2;
    queue.assign(1, s);
    std::vector<CellId> comp;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t l = queue[head];
      comp.push_back(box.global(field, l));
      const auto p = box.local_coords(l);
      for (const auto& o : kFaceOffsets) {
        std::array<std::ptrdiff_t, 3> q{};
        bool inside = true;
        for (int a = 0; a < 3; ++a) {
          q[a] = static_cast<std::ptrdiff_t>(p[a]) + o[a];
          if (q[a] < 0 || q[a] >= static_cast<std::ptrdiff_t>(box.size[a])) inside = false;
        }
        if (!inside) continue;
        const std::size_t nl = box.local(q[0], q[1], q[2]);
        if (mask[nl] == 1) {
          mask[nl] = 2;
          queue.push_back(nl);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<CellId> find_seed_cells(const CellField& field, double lambda2_init) {
  std::vector<std::uint8_t> is_seed(field.count(), 0);
  const auto& d = field.cdims;
  detail::parallel_for(field.count(), [&](std::size_t c) {
    const double v = field.cell_min[c];
    if (!(v < lambda2_init)) return;
    const Index3 p = field.unlinear(c);
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const auto x = static_cast<std::ptrdiff_t>(p.i) + dx;
          const auto y = static_cast<std::ptrdiff_t>(p.j) + dy;
          const auto z = static_cast<std::ptrdiff_t>(p.k) + dz;
          if (x < 0 || y < 0 || z < 0 || x >= static_cast<std::ptrdiff_t>(d[0]) ||
              y >= static_cast<std::ptrdiff_t>(d[1]) || z >= static_cast<std::ptrdiff_t>(d[2]))
            continue;
          const CellId n = field.linear(x, y, z);
          const double w = field.cell_min[n];
          if (!(w < lambda2_init)) continue;
          if (w < v || (w == v && n < c)) return;
        }
    is_seed[c] = 1;
  });
  std::vector<CellId> seeds;
  for (CellId c = 0; c < is_seed.size(); ++c)
    if (is_seed[c]) seeds.push_back(c);
  return seeds;
}

namespace {

// BFS over the global grid marking `claimed`; returns the grown cells, sorted.
std::vector<CellId> grow_cells(const CellField& field, CellId seed, double threshold, std::vector<std::uint8_t>& claimed) {
  std::vector<CellId> cells;
  if (claimed[seed] || !(field.cell_min[seed] < threshold)) return cells;
  const auto& d = field.cdims;
  claimed[seed] = 1;
  cells.push_back(seed);
  for (std::size_t head = 0; head < cells.size(); ++head) {
    const Index3 p = field.unlinear(cells[head]);
    for (const auto& o : kFaceOffsets) {
      const auto x = static_cast<std::ptrdiff_t>(p.i) + o[0];
      const auto y = static_cast<std::ptrdiff_t>(p.j) + o[1];
      const auto z = static_cast<std::ptrdiff_t>(p.k) + o[2];
      if (x < 0 || y < 0 || z < 0 || x >= static_cast<std::ptrdiff_t>(d[0]) ||
          y >= static_cast<std::ptrdiff_t>(d[1]) || z >= static_cast<std::ptrdiff_t>(d[2]))
        continue;
      const CellId n = field.linear(x, y, z);
      if (claimed[n] || !(field.cell_min[n] < threshold)) continue;
      claimed[n] = 1;
      cells.push_back(n);
    }
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

}  // namespace

VortexRegion grow_region(const CellField& field, CellId seed, double lambda2_init, std::int64_t id) {
  if (seed >= field.count()) throw ValidationError("seed cell outside grid");
  std::vector<std::uint8_t> claimed(field.count(), 0);
  return VortexRegion::from_cells(id, grow_cells(field, seed, lambda2_init, claimed), field);
}

std::vector<VortexRegion> extract_all_regions(const CellField& field, double lambda2_init, double noise_frac) {
  std::vector<CellId> seeds = find_seed_cells(field, lambda2_init);
  std::sort(seeds.begin(), seeds.end(), [&](CellId a, CellId b) {
    if (field.cell_min[a] != field.cell_min[b]) return field.cell_min[a] < field.cell_min[b];
    return a < b;
  });
  const double min_cells = noise_frac * static_cast<double>(field.count());
  std::vector<std::uint8_t> claimed(field.count(), 0);
  std::vector<VortexRegion> regions;
  for (CellId seed : seeds) {
    if (claimed[seed]) continue;
    std::vector<CellId> cells = grow_cells(field, seed, lambda2_init, claimed);
    if (static_cast<double>(cells.size()) < min_cells) continue;
    regions.push_back(VortexRegion::from_cells(static_cast<std::int64_t>(regions.size()), std::move(cells), field));
  }
  return regions;
}

std::vector<IsoComponent> isosurface_components(const CellField& field, const VortexRegion& region, double iso,
                                                double min_comp_frac) {
  std::vector<CellId> below;
  for (CellId c : region.cells)
    if (field.cell_min[c] < iso) below.push_back(c);
  const double min_cells = min_comp_frac * static_cast<double>(field.count());
  std::vector<IsoComponent> out;
  for (auto& cells : connected_components(field, below)) {
    if (static_cast<double>(cells.size()) < min_cells) continue;
    IsoComponent comp;
    comp.color = static_cast<int>(out.size());
    comp.bbox = cells_bbox(field, cells);
    comp.diag_len = comp.bbox.diagonal();
    comp.cells = std::move(cells);
    out.push_back(std::move(comp));
  }
  return out;
}

double vsf_min_local_ratio(double region_diag, double domain_diag, double vsf) {
  const double global_ratio_pct = 100.0 * region_diag / domain_diag;
  return vsf / global_ratio_pct;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// In-place 1D squared distance transform (lower envelope of parabolas) of
// f[0..n) with stride, weight w = spacing^2.
void edt_1d(double* f, std::size_t n, std::size_t stride, double w, std::vector<double>& buf,
            std::vector<std::size_t>& v, std::vector<double>& z) {
  buf.resize(n);
  for (std::size_t q = 0; q < n; ++q) buf[q] = f[q * stride];
  v.resize(n);
  z.resize(n + 1);
  std::ptrdiff_t k = -1;
  for (std::size_t q = 0; q < n; ++q) {
    if (buf[q] == kInf) continue;
    const double fq = buf[q] + w * static_cast<double>(q) * static_cast<double>(q);
    double s = -kInf;
    while (k >= 0) {
      const std::size_t p = v[k];
      const double fp = buf[p] + w * static_cast<double>(p) * static_cast<double>(p);
      s = (fq - fp) / (2.0 * w * static_cast<double>(q - p));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = (k == 0) ? -kInf : s;
    z[k + 1] = kInf;
  }
  if (k < 0) return;  // no sites on this line
  std::ptrdiff_t j = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[j + 1] < static_cast<double>(q)) ++j;
    const double dq = static_cast<double>(q) - static_cast<double>(v[j]);
    f[q * stride] = buf[v[j]] + w * dq * dq;
  }
}

// Squared Euclidean distance (world units) from every box cell to the nearest
// site, by separable transforms along x, y then z.
std::vector<double> squared_edt(const CellBox& box, const std::vector<std::uint8_t>& sites, const Vec3& spacing) {
  std::vector<double> d(box.volume);
  for (std::size_t l = 0; l < box.volume; ++l) d[l] = sites[l] ? 0.0 : kInf;
  std::vector<double> buf;
  std::vector<std::size_t> v;
  std::vector<double> z;
  const auto [sx, sy, sz] = box.size;
  for (std::size_t k = 0; k < sz; ++k)
    for (std::size_t j = 0; j < sy; ++j) edt_1d(&d[box.local(0, j, k)], sx, 1, spacing[0] * spacing[0], buf, v, z);
  for (std::size_t k = 0; k < sz; ++k)
    for (std::size_t i = 0; i < sx; ++i) edt_1d(&d[box.local(i, 0, k)], sy, sx, spacing[1] * spacing[1], buf, v, z);
  for (std::size_t j = 0; j < sy; ++j)
    for (std::size_t i = 0; i < sx; ++i)
      edt_1d(&d[box.local(i, j, 0)], sz, sx * sy, spacing[2] * spacing[2], buf, v, z);
  return d;
}

}  // namespace

std::vector<VortexRegion> split_region(const CellField& field, const VortexRegion& region,
                                       std::span<const IsoComponent> components, double domain_diag, double vsf) {
  if (components.empty() || region.cells.empty()) return {};
  const double min_ratio = vsf_min_local_ratio(region.diag_len, domain_diag, vsf);
  std::vector<const IsoComponent*> kept;
  for (const auto& comp : components)
    if (comp.diag_len / region.diag_len >= min_ratio) kept.push_back(&comp);
  if (kept.size() < 2) return {};

  const CellBox box = CellBox::around(field, region.cells);
  std::vector<double> best(box.volume, kInf);
  std::vector<int> label(box.volume, -1);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto sites = box.mask(field, kept[k]->cells);
    const auto d = squared_edt(box, sites, field.meta.spacing);
    for (CellId c : region.cells) {
      const std::size_t l = box.from_global(field, c);
      if (d[l] < best[l]) {
        best[l] = d[l];
        label[l] = static_cast<int>(k);
      }
    }
  }

  std::vector<std::vector<CellId>> groups(kept.size());
  for (CellId c : region.cells) groups[label[box.from_global(field, c)]].push_back(c);

  std::vector<VortexRegion> children;
  for (const auto& g : groups)
    for (auto& fragment : connected_components(field, g))
      children.push_back(VortexRegion::from_cells(-1, std::move(fragment), field));
  return children;
}

std::vector<std::int64_t> VortexTree::leaves() const {
  std::vector<std::int64_t> out;
  for (const auto& n : nodes)
    if (n.is_leaf()) out.push_back(n.id);
  return out;
}

std::vector<std::int64_t> VortexTree::roots() const {
  std::vector<std::int64_t> out;
  for (const auto& n : nodes)
    if (!n.parent) out.push_back(n.id);
  return out;
}

int VortexTree::depth() const {
  int d = 0;
  for (const auto& n : nodes) d = std::max(d, n.level);
  return d;
}

VortexTree build_tree(const CellField& field, std::vector<VortexRegion> roots, std::span<const double> steps,
                      const SplitParams& params) {
  VortexTree tree;
  std::vector<std::int64_t> leaves;
  for (auto& r : roots) {
    TreeNode n;
    n.id = static_cast<std::int64_t>(tree.nodes.size());
    r.id = n.id;
    n.region = std::move(r);
    leaves.push_back(n.id);
    tree.nodes.push_back(std::move(n));
  }
  const double domain_diag = field.meta.domain_diagonal();

  for (std::size_t k = 0; k < steps.size(); ++k) {
    const double iso = steps[k];
    std::vector<std::vector<VortexRegion>> results(leaves.size());
    detail::parallel_for(leaves.size(), [&](std::size_t i) {
      const VortexRegion& region = tree.nodes[leaves[i]].region;
      const auto comps = isosurface_components(field, region, iso, params.min_comp_frac);
      if (comps.size() >= 2) results[i] = split_region(field, region, comps, domain_diag, params.vsf);
    });

    std::vector<std::int64_t> next;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (results[i].empty()) {
        next.push_back(leaves[i]);
        continue;
      }
      for (auto& child : results[i]) {
        TreeNode n;
        n.id = static_cast<std::int64_t>(tree.nodes.size());
        child.id = n.id;
        n.region = std::move(child);
        n.parent = leaves[i];
        n.split_iso = iso;
        n.level = static_cast<int>(k) + 1;
        tree.nodes[leaves[i]].children.push_back(n.id);
        next.push_back(n.id);
        tree.nodes.push_back(std::move(n));
      }
    }
    leaves = std::move(next);
  }
  return tree;
}

SimplifyResult simplify_region(const CellField& field, const VortexRegion& region, int min_nb1, int min_nb2) {
  if (region.cells.empty()) return {region, true};
  const CellBox box = CellBox::around(field, region.cells, 1);
  std::vector<std::uint8_t> mask = box.mask(field, region.cells);

  auto neighbour_count = [&](std::size_t l) {
    const auto p = box.local_coords(l);
    int n = 0;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          n += mask[box.local(p[0] + dx, p[1] + dy, p[2] + dz)];
        }
    return n;
  };

  std::vector<CellId> pass1;
  for (CellId c : region.cells)
    if (neighbour_count(box.from_global(field, c)) >= min_nb1) pass1.push_back(c);

  double mean = 0.0;
  for (CellId c : region.cells) mean += field.cell_min[c];
  mean /= static_cast<double>(region.cells.size());

  std::fill(mask.begin(), mask.end(), 0);
  for (CellId c : pass1) mask[box.from_global(field, c)] = 1;
  std::vector<CellId> pass2;
  for (CellId c : pass1) {
    if (field.cell_min[c] > mean && neighbour_count(box.from_global(field, c)) < min_nb2) continue;
    pass2.push_back(c);
  }

  auto comps = connected_components(field, pass2);
  if (comps.empty()) return {region, true};
  std::size_t best = 0;
  for (std::size_t i = 1; i < comps.size(); ++i)
    if (comps[i].size() > comps[best].size()) best = i;
  return {VortexRegion::from_cells(region.id, std::move(comps[best]), field), false};
}

}  // namespace vortex
