#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "oracles.hpp"
#include "vortex/errors.hpp"
#include "vortex/geometry.hpp"

using namespace vortex;

namespace {

struct Shape {
  CellField field;
  VortexRegion region;
};

// Cells of a dims-sized cell grid whose centre satisfies `inside`.
template <typename Fn>
Shape voxelize(std::array<std::size_t, 3> cdims, Fn&& inside) {
  Shape s;
  s.field.meta.dims = {cdims[0] + 1, cdims[1] + 1, cdims[2] + 1};
  s.field.cdims = cdims;
  s.field.cell_min.assign(cdims[0] * cdims[1] * cdims[2], 1.0);
  std::vector<CellId> cells;
  for (CellId c = 0; c < s.field.count(); ++c)
    if (inside(s.field.center(c))) {
      cells.push_back(c);
      s.field.cell_min[c] = -1.0;
    }
  s.region = VortexRegion::from_cells(0, cells, s.field);
  return s;
}

double dist_to_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  double t = dot(p - a, ab) / dot(ab, ab);
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + t * ab);
}

int euler_characteristic(const SurfaceMesh& m) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) {
      auto a = t[e], b = t[(e + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  return static_cast<int>(m.vertices.size()) - static_cast<int>(edges.size()) + static_cast<int>(m.triangles.size());
}

// Every directed edge appears once and its reverse once.
bool closed_oriented(const SurfaceMesh& m) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) ++directed[{t[e], t[(e + 1) % 3]}];
  for (const auto& [e, n] : directed) {
    if (n != 1) return false;
    const auto it = directed.find({e.second, e.first});
    if (it == directed.end() || it->second != 1) return false;
  }
  return true;
}

bool inside_dilated(const Shape& s, const Vec3& p) {
  for (CellId c : s.region.cells) {
    const Vec3 q = s.field.center(c);
    if (std::abs(p[0] - q[0]) <= 1.5 && std::abs(p[1] - q[1]) <= 1.5 && std::abs(p[2] - q[2]) <= 1.5) return true;
  }
  return false;
}

std::vector<Vec3> semicircle(double r, int n) {
  std::vector<Vec3> pts;
  for (int i = 0; i <= n; ++i) {
    const double a = std::numbers::pi * i / n;
    pts.push_back({r * std::cos(a), r * std::sin(a), 0.0});
  }
  return pts;
}

}  // namespace

TEST_CASE("boundary surface face counts, orientation and volume") {
  SUBCASE("single cell") {
    const Shape s = voxelize({3, 3, 3}, [](const Vec3& p) { return p[0] == 1.5 && p[1] == 1.5 && p[2] == 1.5; });
    const SurfaceMesh m = extract_boundary_surface(s.field, s.region);
    CHECK(m.triangles.size() == 12);
    CHECK(m.vertices.size() == 8);
    CHECK(mesh_volume(m) == doctest::Approx(1.0));
    CHECK(closed_oriented(m));
  }
  SUBCASE("two cells") {
    const Shape s = voxelize({4, 3, 3}, [](const Vec3& p) { return p[0] < 3 && p[0] > 1 && p[1] == 1.5 && p[2] == 1.5; });
    REQUIRE(s.region.cells.size() == 2);
    const SurfaceMesh m = extract_boundary_surface(s.field, s.region);
    CHECK(m.triangles.size() == 20);
    CHECK(mesh_volume(m) == doctest::Approx(2.0));
  }
  SUBCASE("random blobs are genus-0 closed surfaces") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(4, 8);
    for (int t = 0; t < 10; ++t) {
      const double a = u(rng), b = u(rng), c = u(rng);
      const Shape s = voxelize({20, 20, 20}, [&](const Vec3& p) {
        const double x = (p[0] - 10) / a, y = (p[1] - 10) / b, z = (p[2] - 10) / c;
        return x * x + y * y + z * z < 1.0;
      });
      const SurfaceMesh m = extract_boundary_surface(s.field, s.region);
      CHECK(euler_characteristic(m) == 2);
      CHECK(closed_oriented(m));
      CHECK(mesh_volume(m) == doctest::Approx(static_cast<double>(s.region.cells.size())));
    }
  }
}

TEST_CASE("laplacian smoothing") {
  const Shape s = voxelize({3, 3, 3}, [](const Vec3& p) { return p[0] == 1.5 && p[1] == 1.5 && p[2] == 1.5; });
  const SurfaceMesh cube = extract_boundary_surface(s.field, s.region);
  SUBCASE("zero iterations is the identity") {
    const SurfaceMesh m = laplacian_smooth(cube, 0);
    CHECK(m.vertices == cube.vertices);
  }
  SUBCASE("matches the umbrella oracle") {
    const SurfaceMesh m = laplacian_smooth(cube, 10, 0.5);
    CHECK(m.triangles == cube.triangles);
    const auto ref = oracle::umbrella(cube.vertices, cube.triangles, 10, 0.5);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(distance(m.vertices[i], ref[i]) < 1e-12);
  }
  SUBCASE("one iteration moves no vertex more than half a cell") {
    const SurfaceMesh m = laplacian_smooth(cube, 1, 0.5);
    for (std::size_t i = 0; i < m.vertices.size(); ++i) CHECK(distance(m.vertices[i], cube.vertices[i]) <= 0.5);
  }
  SUBCASE("a 6-cell block keeps most of its volume") {
    const Shape big = voxelize({10, 10, 10}, [](const Vec3& p) {
      return p[0] > 2 && p[0] < 8 && p[1] > 2 && p[1] < 8 && p[2] > 2 && p[2] < 8;
    });
    const SurfaceMesh b = extract_boundary_surface(big.field, big.region);
    CHECK(mesh_volume(laplacian_smooth(b, 10, 0.5)) > 0.6 * mesh_volume(b));
  }
  SUBCASE("flat patch interior is a fixed point") {
    SurfaceMesh grid;
    for (int j = 0; j < 5; ++j)
      for (int i = 0; i < 5; ++i) grid.vertices.push_back({double(i), double(j), 0.0});
    for (std::uint32_t j = 0; j < 4; ++j)
      for (std::uint32_t i = 0; i < 4; ++i) {
        const std::uint32_t a = j * 5 + i;
        grid.triangles.push_back({a, a + 1, a + 6});
        grid.triangles.push_back({a, a + 6, a + 5});
        grid.triangles.push_back({a, a + 1, a + 5});  // symmetric 1-rings
        grid.triangles.push_back({a + 1, a + 6, a + 5});
      }
    const SurfaceMesh m = laplacian_smooth(grid, 1, 0.5);
    for (int j = 1; j < 4; ++j)
      for (int i = 1; i < 4; ++i) {
        const Vec3& p = m.vertices[j * 5 + i];
        CHECK(p[2] == 0.0);
        CHECK(p[0] == doctest::Approx(double(i)));
        CHECK(p[1] == doctest::Approx(double(j)));
      }
  }
}

TEST_CASE("straight tube skeleton follows the axis") {
  const Vec3 a{5.0, 8.0, 8.0}, b{45.0, 8.0, 8.0};
  const Shape s = voxelize({50, 16, 16}, [&](const Vec3& p) {
    return p[0] >= a[0] && p[0] <= b[0] && std::hypot(p[1] - a[1], p[2] - a[2]) <= 3.0;
  });
  std::vector<double> oyf(s.field.meta.vertex_count(), 0.0);
  const Skeleton sk = skeletonize(s.field, s.region, oyf);
  CHECK(!sk.degenerate);
  const auto pts = sk.main_path_points();
  const GeometricFeatures g = geometric_features(pts, AxisRoles{});
  CHECK(g.length == doctest::Approx(40.0).epsilon(0.1));
  double dev = 0.0;
  for (const auto& n : sk.nodes) {
    const double d = dist_to_segment(n.position, a, b);
    CHECK(d <= 1.5);
    dev += d;
  }
  CHECK(dev / static_cast<double>(sk.nodes.size()) < 1.5);
  CHECK(g.s_t > 0.99);
  CHECK(g.rho == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("even and odd width boxes thin to a line along their length") {
  for (int w = 1; w <= 6; ++w)
    for (int axis = 0; axis < 3; ++axis) {
      const Shape s = voxelize({40, 40, 40}, [&](const Vec3& p) {
        for (int ax = 0; ax < 3; ++ax) {
          const double lo = ax == axis ? 5.0 : 10.0;
          const double hi = ax == axis ? 35.0 : 10.0 + w;
          if (p[ax] < lo || p[ax] > hi) return false;
        }
        return true;
      });
      const auto thin = thin_cells(s.field, s.region.cells);
      CHECK(thin.size() >= 24);
      CHECK(thin.size() <= 31);
    }
}

TEST_CASE("quarter-circle tube has a single unbranched path") {
  const double r0 = 16.0;
  const Shape s = voxelize({30, 30, 10}, [&](const Vec3& p) {
    const double r = std::hypot(p[0] - 2.0, p[1] - 2.0);
    return p[0] >= 2 && p[1] >= 2 && std::abs(r - r0) <= 2.5 && std::abs(p[2] - 5.0) <= 2.5;
  });
  std::vector<double> oyf(s.field.meta.vertex_count(), 0.0);
  const Skeleton sk = skeletonize(s.field, s.region, oyf);
  std::vector<int> degree(sk.nodes.size(), 0);
  for (const auto& [x, y] : sk.edges) {
    ++degree[x];
    ++degree[y];
  }
  CHECK(std::count(degree.begin(), degree.end(), 1) == 2);
  CHECK(std::count_if(degree.begin(), degree.end(), [](int d) { return d > 2; }) == 0);
  for (const auto& n : sk.nodes) CHECK(inside_dilated(s, n.position));
}

TEST_CASE("hairpin-shaped voxel set: two free ends and the path crosses the head") {
  // Legs along x at y = 8 and y = 28, joined by a half ring around x = 30.
  const Shape s = voxelize({44, 36, 12}, [](const Vec3& p) {
    if (std::abs(p[2] - 6.0) > 2.5) return false;
    if (p[0] <= 30.0) return p[0] >= 4.0 && (std::abs(p[1] - 8.0) <= 2.5 || std::abs(p[1] - 28.0) <= 2.5);
    return std::abs(std::hypot(p[0] - 30.0, p[1] - 18.0) - 10.0) <= 2.5;
  });
  std::vector<double> oyf(s.field.meta.vertex_count(), 0.0);
  const Skeleton sk = skeletonize(s.field, s.region, oyf);
  std::vector<int> degree(sk.nodes.size(), 0);
  for (const auto& [x, y] : sk.edges) {
    ++degree[x];
    ++degree[y];
  }
  CHECK(std::count(degree.begin(), degree.end(), 1) >= 2);
  double max_x = 0.0;
  for (const auto& p : sk.main_path_points()) max_x = std::max(max_x, p[0]);
  CHECK(max_x > 37.0);
  const auto g = geometric_features(sk.main_path_points(), AxisRoles{});
  CHECK(g.rho > 1.5);
}

TEST_CASE("skeleton samples omega_y prime at its nodes") {
  const Shape s = voxelize({30, 12, 12}, [](const Vec3& p) {
    return p[0] >= 3 && p[0] <= 27 && std::hypot(p[1] - 6, p[2] - 6) <= 2.5;
  });
  std::vector<double> oyf(s.field.meta.vertex_count());
  for (std::size_t v = 0; v < oyf.size(); ++v) oyf[v] = static_cast<double>(s.field.meta.unlinear(v).i);
  const Skeleton sk = skeletonize(s.field, s.region, oyf);
  for (const auto& n : sk.nodes) CHECK(n.omega_y_prime == doctest::Approx(n.position[0]).epsilon(1e-9));
}

TEST_CASE("thin region gives a degenerate path through cell centres") {
  const Shape s = voxelize({12, 5, 5}, [](const Vec3& p) { return p[1] == 2.5 && p[2] == 2.5 && p[0] > 2 && p[0] < 9; });
  std::vector<double> oyf(s.field.meta.vertex_count(), 0.0);
  const Skeleton sk = skeletonize(s.field, s.region, oyf);
  CHECK(sk.main_path.size() >= 2);
  for (const auto& n : sk.nodes) CHECK(inside_dilated(s, n.position));
}

TEST_CASE("geometric features from their definitions") {
  SUBCASE("straight streamwise path") {
    const std::vector<Vec3> p{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {5, 0, 0}};
    const auto g = geometric_features(p, AxisRoles{});
    CHECK(g.curvature == doctest::Approx(0.0));
    CHECK(g.s_t == doctest::Approx(1.0));
    CHECK(g.s_p == doctest::Approx(0.0));
    CHECK(g.s_v == doctest::Approx(0.0));
    CHECK(g.length == doctest::Approx(5.0));
    CHECK(g.rho == doctest::Approx(1.0));
  }
  SUBCASE("right angle") {
    const std::vector<Vec3> p{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}};
    const auto g = geometric_features(p, AxisRoles{});
    CHECK(g.curvature == doctest::Approx(std::numbers::pi / 2));
    CHECK(g.s_t == doctest::Approx(0.5));
    CHECK(g.s_p == doctest::Approx(0.5));
  }
  SUBCASE("semicircle ratio") {
    const auto g = geometric_features(semicircle(10.0, 400), AxisRoles{});
    CHECK(g.rho == doctest::Approx(std::numbers::pi / std::sqrt(5.0)).epsilon(0.1));
  }
  SUBCASE("roles permute the direction features") {
    const std::vector<Vec3> p{{0, 0, 0}, {0, 0, 3}};
    const auto g = geometric_features(p, AxisRoles{2, 0, 1});
    CHECK(g.s_t == doctest::Approx(1.0));
  }
  SUBCASE("duplicate points and too-short paths") {
    const std::vector<Vec3> p{{0, 0, 0}, {0, 0, 0}, {1, 0, 0}, {1, 0, 0}};
    CHECK(geometric_features(p, AxisRoles{}).n_points == 2);
    const std::vector<Vec3> q{{1, 1, 1}, {1, 1, 1}};
    CHECK_THROWS_AS(geometric_features(q, AxisRoles{}), ValidationError);
  }
}

TEST_CASE("features agree with the oracle and with rigid motions on random paths") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<Vec3> p{{0, 0, 0}};
    for (int i = 0; i < 3 + t % 20; ++i) p.push_back(p.back() + Vec3{g(rng) + 1.0, g(rng), g(rng)});
    const auto f = geometric_features(p, AxisRoles{});
    const auto o = oracle::path_features(p);
    CHECK(f.curvature == doctest::Approx(o.curvature).epsilon(1e-9));
    CHECK(f.s_t == doctest::Approx(o.s_t).epsilon(1e-9));
    CHECK(f.s_p == doctest::Approx(o.s_p).epsilon(1e-9));
    CHECK(f.s_v == doctest::Approx(o.s_v).epsilon(1e-9));
    CHECK(f.length == doctest::Approx(o.length).epsilon(1e-9));
    CHECK(f.rho >= 0.98);

    // Rotate about z by a random angle and shift.
    const double a = g(rng);
    const Mat3 rot{{{std::cos(a), -std::sin(a), 0}, {std::sin(a), std::cos(a), 0}, {0, 0, 1}}};
    std::vector<Vec3> q;
    for (const auto& x : p) q.push_back(mat_vec(rot, x) + Vec3{3, -2, 7});
    const auto h = geometric_features(q, AxisRoles{});
    CHECK(h.curvature == doctest::Approx(f.curvature).epsilon(1e-9));
    CHECK(h.length == doctest::Approx(f.length).epsilon(1e-9));
    CHECK(h.rho == doctest::Approx(f.rho).epsilon(1e-9));
    CHECK(h.s_v == doctest::Approx(f.s_v).epsilon(1e-9));

    std::vector<Vec3> r(p.rbegin(), p.rend());
    const auto k = geometric_features(r, AxisRoles{});
    CHECK(k.curvature == doctest::Approx(f.curvature).epsilon(1e-12));
    CHECK(k.s_t == doctest::Approx(f.s_t).epsilon(1e-12));
    CHECK(k.rho == doctest::Approx(f.rho).epsilon(1e-9));
  }
}

TEST_CASE("oriented box diagonal of an axis box") {
  std::vector<Vec3> pts;
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; j <= 2; ++j) pts.push_back({double(i) * 2, double(j), 0.0});
  CHECK(oriented_bbox_diagonal(pts) == doctest::Approx(std::hypot(20.0, 2.0)));
}
