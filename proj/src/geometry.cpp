#include "vortex/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>

#include "cell_box.hpp"
#include "vortex/errors.hpp"
#include "vortex/linalg.hpp"

namespace vortex {

using detail::CellBox;
using detail::kFaceOffsets;

SurfaceMesh extract_boundary_surface(const CellField& field, const VortexRegion& region) {
  SurfaceMesh mesh;
  if (region.cells.empty()) return mesh;
  const CellBox box = CellBox::around(field, region.cells, 1);
  const auto mask = box.mask(field, region.cells);
  const GridMeta& meta = field.meta;

  std::map<std::size_t, std::uint32_t> vertex_ids;
  auto vertex = [&](std::size_t i, std::size_t j, std::size_t k) {
    const std::size_t key = meta.linear(i, j, k);
    auto [it, inserted] = vertex_ids.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
    if (inserted) mesh.vertices.push_back(meta.position({i, j, k}));
    return it->second;
  };

  for (CellId c : region.cells) {
    const Index3 p = field.unlinear(c);
    const auto l = box.local_coords(box.from_global(field, c));
    for (int f = 0; f < 6; ++f) {
      const auto& o = kFaceOffsets[f];
      if (mask[box.local(l[0] + o[0], l[1] + o[1], l[2] + o[2])]) continue;
      const int axis = f / 2;
      const std::size_t plane = (f % 2 == 0) ? p[axis] : p[axis] + 1;
      const int u = (axis + 1) % 3;
      const int v = (axis + 2) % 3;
      std::array<std::uint32_t, 4> quad{};
      const std::array<std::array<int, 2>, 4> corners{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
      for (int q = 0; q < 4; ++q) {
        std::array<std::size_t, 3> g{};
        g[axis] = plane;
        g[u] = p[u] + corners[q][0];
        g[v] = p[v] + corners[q][1];
        quad[q] = vertex(g[0], g[1], g[2]);
      }
      // (u, v, axis) is right-handed, so the corner order faces +axis.
      if (f % 2 == 0) std::swap(quad[1], quad[3]);
      mesh.triangles.push_back({quad[0], quad[1], quad[2]});
      mesh.triangles.push_back({quad[0], quad[2], quad[3]});
    }
  }
  return mesh;
}

SurfaceMesh laplacian_smooth(SurfaceMesh mesh, int iterations, double factor) {
  if (iterations <= 0) return mesh;
  std::vector<std::vector<std::uint32_t>> ring(mesh.vertices.size());
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      ring[t[e]].push_back(t[(e + 1) % 3]);
      ring[t[(e + 1) % 3]].push_back(t[e]);
    }
  for (auto& r : ring) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  std::vector<Vec3> next(mesh.vertices.size());
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      if (ring[i].empty()) {
        next[i] = mesh.vertices[i];
        continue;
      }
      Vec3 mean{};
      for (auto n : ring[i]) mean = mean + mesh.vertices[n];
      mean = (1.0 / static_cast<double>(ring[i].size())) * mean;
      next[i] = mesh.vertices[i] + factor * (mean - mesh.vertices[i]);
    }
    mesh.vertices.swap(next);
  }
  return mesh;
}

double mesh_volume(const SurfaceMesh& mesh) {
  double v = 0.0;
  for (const auto& t : mesh.triangles)
    v += dot(mesh.vertices[t[0]], cross(mesh.vertices[t[1]], mesh.vertices[t[2]]));
  return v / 6.0;
}

std::vector<Vec3> Skeleton::main_path_points() const {
  std::vector<Vec3> pts;
  pts.reserve(main_path.size());
  for (auto i : main_path) pts.push_back(nodes[i].position);
  return pts;
}

namespace {

// 3x3x3 neighbourhood indexed (dx+1) + 3(dy+1) + 9(dz+1); centre is 13.
struct NeighbourhoodTables {
  std::array<std::vector<int>, 27> adj26;
  std::array<std::vector<int>, 27> adj6_n18;
  std::array<bool, 27> in_n18{};
  std::array<int, 6> face{};

  NeighbourhoodTables() {
    auto coord = [](int i) { return std::array<int, 3>{i % 3 - 1, (i / 3) % 3 - 1, i / 9 - 1}; };
    for (int i = 0; i < 27; ++i) {
      const auto a = coord(i);
      const int nz = (a[0] != 0) + (a[1] != 0) + (a[2] != 0);
      in_n18[i] = (i != 13 && nz <= 2);
    }
    int f = 0;
    for (int i = 0; i < 27; ++i) {
      const auto a = coord(i);
      if (std::abs(a[0]) + std::abs(a[1]) + std::abs(a[2]) == 1) face[f++] = i;
      if (i == 13) continue;
      for (int j = 0; j < 27; ++j) {
        if (j == 13 || j == i) continue;
        const auto b = coord(j);
        const int cheb = std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])});
        const int man = std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]);
        if (cheb == 1) adj26[i].push_back(j);
        if (man == 1 && in_n18[i] && in_n18[j]) adj6_n18[i].push_back(j);
      }
    }
  }
};

const NeighbourhoodTables& tables() {
  static const NeighbourhoodTables t;
  return t;
}

// Simple point for (26, 6) topology: exactly one 26-connected foreground
// component in N26, exactly one 6-connected background component in N18 that
// touches a face neighbour.
bool is_simple(const std::array<std::uint8_t, 27>& nb) {
  const auto& t = tables();
  std::array<std::uint8_t, 27> seen{};
  std::array<int, 27> stack{};

  int fg_components = 0;
  for (int s = 0; s < 27; ++s) {
    if (s == 13 || !nb[s] || seen[s]) continue;
    if (++fg_components > 1) return false;
    int top = 0;
    stack[top++] = s;
    seen[s] = 1;
    while (top > 0) {
      const int cur = stack[--top];
      for (int n : t.adj26[cur])
        if (nb[n] && !seen[n]) {
          seen[n] = 1;
          stack[top++] = n;
        }
    }
  }
  if (fg_components != 1) return false;

  seen.fill(0);
  int bg_components = 0;
  for (int s : t.face) {
    if (nb[s] || seen[s]) continue;
    if (++bg_components > 1) return false;
    int top = 0;
    stack[top++] = s;
    seen[s] = 1;
    while (top > 0) {
      const int cur = stack[--top];
      for (int n : t.adj6_n18[cur])
        if (!nb[n] && !seen[n]) {
          seen[n] = 1;
          stack[top++] = n;
        }
    }
  }
  return bg_components == 1;
}

}  // namespace

std::vector<CellId> thin_cells(const CellField& field, std::span<const CellId> cells) {
  if (cells.empty()) return {};
  const CellBox box = CellBox::around(field, cells, 1);
  auto mask = box.mask(field, cells);
  std::vector<std::size_t> fg;
  fg.reserve(cells.size());
  for (CellId c : cells) fg.push_back(box.from_global(field, c));
  std::sort(fg.begin(), fg.end());

  const std::size_t sx = box.size[0];
  const std::size_t sxy = box.size[0] * box.size[1];
  auto gather = [&](std::size_t l, std::array<std::uint8_t, 27>& nb) {
    int n = 0;
    int idx = 0;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx, ++idx) {
          const std::size_t q = l + dx + dy * static_cast<std::ptrdiff_t>(sx) + dz * static_cast<std::ptrdiff_t>(sxy);
          nb[idx] = mask[q];
          if (idx != 13) n += mask[q];
        }
    return n;
  };

  const std::array<std::ptrdiff_t, 6> dir_offset{-1, 1, -static_cast<std::ptrdiff_t>(sx), static_cast<std::ptrdiff_t>(sx),
                                                 -static_cast<std::ptrdiff_t>(sxy), static_cast<std::ptrdiff_t>(sxy)};
  std::array<std::uint8_t, 27> nb{};
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::ptrdiff_t off : dir_offset) {
      std::vector<std::size_t> candidates;
      // Border in this direction and backed by foreground on the opposite
      // side; one-voxel-thick runs are left for the other directions.
      for (std::size_t l : fg) {
        if (mask[l + off] || !mask[l - off]) continue;
        if (gather(l, nb) <= 1) continue;  // end point or isolated
        if (is_simple(nb)) candidates.push_back(l);
      }
      for (std::size_t l : candidates) {
        if (!mask[l - off] || gather(l, nb) <= 1 || !is_simple(nb)) continue;
        mask[l] = 0;
        changed = true;
      }
      if (!candidates.empty()) std::erase_if(fg, [&](std::size_t l) { return !mask[l]; });
    }
  }

  std::vector<CellId> out;
  out.reserve(fg.size());
  for (std::size_t l : fg) {
    out.push_back(box.global(field, l));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

bool point_in_region(const CellField& field, const std::vector<CellId>& sorted_cells, const Vec3& p) {
  std::array<std::size_t, 3> idx{};
  for (int a = 0; a < 3; ++a) {
    const double u = (p[a] - field.meta.origin[a]) / field.meta.spacing[a];
    if (u < 0.0 || u >= static_cast<double>(field.cdims[a])) return false;
    idx[a] = static_cast<std::size_t>(u);
  }
  return std::binary_search(sorted_cells.begin(), sorted_cells.end(), field.linear(idx[0], idx[1], idx[2]));
}

// Farthest node from `source` by path length, with predecessor links.
std::pair<std::uint32_t, std::vector<std::int64_t>> farthest(const std::vector<std::vector<std::pair<std::uint32_t, double>>>& adj,
                                                             std::uint32_t source) {
  std::vector<double> dist(adj.size(), std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> pred(adj.size(), -1);
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (auto [v, w] : adj[u]) {
      if (d + w < dist[v]) {
        dist[v] = d + w;
        pred[v] = u;
        pq.emplace(dist[v], v);
      }
    }
  }
  std::uint32_t best = source;
  for (std::uint32_t i = 0; i < dist.size(); ++i)
    if (std::isfinite(dist[i]) && dist[i] > dist[best]) best = i;
  return {best, std::move(pred)};
}

void douglas_peucker(const std::vector<Vec3>& pts, std::size_t lo, std::size_t hi, double tol,
                     std::vector<std::uint8_t>& keep) {
  if (hi <= lo + 1) return;
  const Vec3 a = pts[lo];
  const Vec3 ab = pts[hi] - a;
  const double len2 = dot(ab, ab);
  double worst = -1.0;
  std::size_t worst_i = lo;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    const Vec3 ap = pts[i] - a;
    double d = 0.0;
    if (len2 == 0.0) {
      d = norm(ap);
    } else {
      const double t = std::clamp(dot(ap, ab) / len2, 0.0, 1.0);
      d = norm(ap - t * ab);
    }
    if (d > worst) {
      worst = d;
      worst_i = i;
    }
  }
  if (worst > tol) {
    keep[worst_i] = 1;
    douglas_peucker(pts, lo, worst_i, tol, keep);
    douglas_peucker(pts, worst_i, hi, tol, keep);
  }
}

// Two-point path across the region along its principal axis.
void degenerate_path(const CellField& field, const VortexRegion& region, Skeleton& sk) {
  sk.degenerate = true;
  sk.nodes.clear();
  sk.edges.clear();
  std::vector<Vec3> centers;
  for (CellId c : region.cells) centers.push_back(field.center(c));
  Vec3 a{};
  Vec3 b{};
  if (centers.size() == 1) {
    a = centers[0];
    b = centers[0];
    a[0] -= 0.5 * field.meta.spacing[0];
    b[0] += 0.5 * field.meta.spacing[0];
  } else {
    Vec3 mean{};
    for (const auto& c : centers) mean = mean + c;
    mean = (1.0 / static_cast<double>(centers.size())) * mean;
    Mat3 cov{};
    for (const auto& c : centers) {
      const Vec3 d = c - mean;
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) cov[r][s] += d[r] * d[s];
    }
    const auto eig = linalg::symmetric_eigen(cov);
    const Vec3 axis{eig.vectors[0][0], eig.vectors[1][0], eig.vectors[2][0]};
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t i = 1; i < centers.size(); ++i) {
      if (dot(centers[i], axis) < dot(centers[lo], axis)) lo = i;
      if (dot(centers[i], axis) > dot(centers[hi], axis)) hi = i;
    }
    a = centers[lo];
    b = centers[hi];
    if (lo == hi) b[0] += 0.5 * field.meta.spacing[0];
  }
  sk.nodes.push_back({a, 0.0});
  sk.nodes.push_back({b, 0.0});
  sk.edges.emplace_back(0, 1);
  sk.main_path = {0, 1};
}

}  // namespace

Skeleton skeletonize(const CellField& field, const VortexRegion& region, std::span<const double> omega_y_prime,
                     const SkeletonParams& params) {
  if (region.cells.empty()) throw ValidationError("cannot skeletonize an empty region");
  Skeleton sk;
  const std::vector<CellId> voxels = thin_cells(field, region.cells);
  const double h = std::min({field.meta.spacing[0], field.meta.spacing[1], field.meta.spacing[2]});

  if (voxels.size() < 2) {
    degenerate_path(field, region, sk);
  } else {
    for (CellId c : voxels) sk.nodes.push_back({field.center(c), 0.0});
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(voxels.size());
    for (std::uint32_t i = 0; i < voxels.size(); ++i) {
      const Index3 p = field.unlinear(voxels[i]);
      for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0 && dz == 0) continue;
            const auto x = static_cast<std::ptrdiff_t>(p.i) + dx;
            const auto y = static_cast<std::ptrdiff_t>(p.j) + dy;
            const auto z = static_cast<std::ptrdiff_t>(p.k) + dz;
            if (x < 0 || y < 0 || z < 0 || x >= static_cast<std::ptrdiff_t>(field.cdims[0]) ||
                y >= static_cast<std::ptrdiff_t>(field.cdims[1]) || z >= static_cast<std::ptrdiff_t>(field.cdims[2]))
              continue;
            const CellId n = field.linear(x, y, z);
            const auto it = std::lower_bound(voxels.begin(), voxels.end(), n);
            if (it == voxels.end() || *it != n) continue;
            const auto j = static_cast<std::uint32_t>(it - voxels.begin());
            adj[i].emplace_back(j, distance(sk.nodes[i].position, sk.nodes[j].position));
            if (i < j) sk.edges.emplace_back(i, j);
          }
    }
    const std::uint32_t a = farthest(adj, 0).first;
    const auto [b, pred] = farthest(adj, a);
    std::vector<std::uint32_t> path;
    for (std::int64_t v = b; v != -1; v = pred[v]) path.push_back(static_cast<std::uint32_t>(v));
    std::reverse(path.begin(), path.end());

    if (path.size() < 2) {
      degenerate_path(field, region, sk);
    } else {
      if (params.extend_ends) {
        auto extend = [&](bool at_front) {
          const std::size_t n = path.size();
          const std::size_t k = std::min<std::size_t>(3, n - 1);
          const Vec3 end = sk.nodes[at_front ? path[0] : path[n - 1]].position;
          const Vec3 inner = sk.nodes[at_front ? path[k] : path[n - 1 - k]].position;
          Vec3 dir = end - inner;
          const double len = norm(dir);
          if (len == 0.0) return;
          dir = (1.0 / len) * dir;
          Vec3 last = end;
          for (int step = 1;; ++step) {
            const Vec3 probe = end + (0.5 * h * step) * dir;
            if (!point_in_region(field, region.cells, probe)) break;
            last = probe;
          }
          if (distance(last, end) < 0.5 * h) return;
          const auto id = static_cast<std::uint32_t>(sk.nodes.size());
          sk.nodes.push_back({last, 0.0});
          sk.edges.emplace_back(at_front ? path[0] : path[n - 1], id);
          if (at_front) path.insert(path.begin(), id);
          else path.push_back(id);
        };
        extend(true);
        extend(false);
      }
      std::vector<Vec3> pts;
      for (auto i : path) pts.push_back(sk.nodes[i].position);
      std::vector<std::uint8_t> keep(pts.size(), 0);
      keep.front() = 1;
      keep.back() = 1;
      douglas_peucker(pts, 0, pts.size() - 1, params.decimate_tolerance_cells * h, keep);
      for (std::size_t i = 0; i < path.size(); ++i)
        if (keep[i]) sk.main_path.push_back(path[i]);
    }
  }

  for (auto& node : sk.nodes) node.omega_y_prime = sample_trilinear(field.meta, omega_y_prime, node.position);
  return sk;
}

double oriented_bbox_diagonal(std::span<const Vec3> points) {
  if (points.empty()) return 0.0;
  Vec3 mean{};
  for (const auto& p : points) mean = mean + p;
  mean = (1.0 / static_cast<double>(points.size())) * mean;
  Mat3 cov{};
  for (const auto& p : points) {
    const Vec3 d = p - mean;
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s) cov[r][s] += d[r] * d[s];
  }
  const auto eig = linalg::symmetric_eigen(cov);
  double diag2 = 0.0;
  for (int c = 0; c < 3; ++c) {
    const Vec3 axis{eig.vectors[0][c], eig.vectors[1][c], eig.vectors[2][c]};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : points) {
      const double t = dot(p - mean, axis);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    diag2 += (hi - lo) * (hi - lo);
  }
  return std::sqrt(diag2);
}

GeometricFeatures geometric_features(std::span<const Vec3> path, const AxisRoles& roles) {
  std::vector<Vec3> pts;
  for (const auto& p : path)
    if (pts.empty() || !(p == pts.back())) pts.push_back(p);
  if (pts.size() < 2) throw ValidationError("geometric features need at least two distinct path points");

  const std::size_t n = pts.size();
  std::vector<Vec3> seg(n - 1);
  GeometricFeatures f;
  f.n_points = n;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec3 d = pts[i + 1] - pts[i];
    const double len = norm(d);
    f.length += len;
    seg[i] = (1.0 / len) * d;
  }
  if (n >= 3) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < seg.size(); ++i)
      sum += std::atan2(norm(cross(seg[i], seg[i + 1])), dot(seg[i], seg[i + 1]));
    f.curvature = sum / static_cast<double>(n - 2);
  }
  double st = 0.0;
  double sp = 0.0;
  double sv = 0.0;
  for (const auto& s : seg) {
    st += std::abs(s[roles.streamwise]);
    sp += std::abs(s[roles.spanwise]);
    sv += std::abs(s[roles.vertical]);
  }
  const auto m = static_cast<double>(seg.size());
  f.s_t = st / m;
  f.s_p = sp / m;
  f.s_v = sv / m;
  f.bbox_diag = oriented_bbox_diagonal(pts);
  f.rho = f.bbox_diag > 0.0 ? f.length / f.bbox_diag : 1.0;
  return f;
}

}  // namespace vortex
