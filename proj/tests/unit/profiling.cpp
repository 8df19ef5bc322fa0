#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vortex/errors.hpp"
#include "vortex/field_core.hpp"
#include "vortex/geometry.hpp"
#include "vortex/profiling.hpp"

using namespace vortex;

namespace {

FieldSet rigid_rotation(std::size_t n) {
  GridMeta meta;
  meta.dims = {n, n, n};
  VelocityField vel;
  vel.data.resize(meta.vertex_count());
  for (std::size_t idx = 0; idx < vel.data.size(); ++idx) {
    const Vec3 p = meta.position(meta.unlinear(idx));
    vel.data[idx] = {-p[1], p[0], 0.0};
  }
  return compute_criteria(meta, vel);
}

CellField cells_of(const GridMeta& meta) {
  CellField c;
  c.meta = meta;
  c.cdims = meta.cell_dims();
  c.cell_min.assign(meta.cell_count(), 0.0);
  return c;
}

VortexProfile random_profile(std::mt19937_64& rng, std::int64_t id) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  VortexProfile p;
  p.id = id;
  for (auto& v : p.values) v = u(rng);
  return p;
}

}  // namespace

TEST_CASE("feature names and lookup") {
  CHECK(kFeatureNames.size() == 19);
  CHECK(feature_index("lambda2") == 0u);
  CHECK(feature_index("rho") == 18u);
  CHECK(feature_index("Size") == static_cast<std::size_t>(Feature::Size));
  CHECK_FALSE(feature_index("nope").has_value());
  CHECK_FALSE(feature_index("size").has_value());
}

TEST_CASE("region vertices are unique and ascending") {
  GridMeta meta;
  meta.dims = {5, 5, 5};
  const CellField cells = cells_of(meta);
  const VortexRegion one = VortexRegion::from_cells(0, {cells.linear(1, 1, 1)}, cells);
  CHECK(region_vertices(cells, one).size() == 8);
  const VortexRegion two = VortexRegion::from_cells(0, {cells.linear(1, 1, 1), cells.linear(2, 1, 1)}, cells);
  const auto v = region_vertices(cells, two);
  CHECK(v.size() == 12);
  CHECK(std::is_sorted(v.begin(), v.end()));
}

TEST_CASE("rigid rotation profile") {
  const FieldSet fs = rigid_rotation(9);
  const CellField cells = cells_of(fs.meta);
  std::vector<CellId> interior;
  for (std::size_t k = 2; k < 6; ++k)
    for (std::size_t j = 2; j < 6; ++j)
      for (std::size_t i = 2; i < 6; ++i) interior.push_back(cells.linear(i, j, k));
  std::sort(interior.begin(), interior.end());
  const auto region = VortexRegion::from_cells(4, interior, cells);
  GeometricFeatures g;
  g.curvature = 0.3;
  g.s_t = 0.1;
  g.s_p = 0.2;
  g.s_v = 0.9;
  g.length = 7.0;
  g.rho = 1.2;
  const VortexProfile p = build_profile(region, fs, g, 2.5);
  CHECK(p.id == 4);
  CHECK(p[Feature::Q] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(p[Feature::Lambda2] == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(p[Feature::Enstrophy] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(std::abs(p[Feature::Divergence]) < 1e-6);
  CHECK(p[Feature::Vorticity] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(p[Feature::Size] == 64.0);
  CHECK(p[Feature::Curvature] == 0.3);
  CHECK(p[Feature::HairpinCurvature] == 2.5);
  CHECK(p[Feature::StreamwiseDir] == 0.1);
  CHECK(p[Feature::SpanwiseDir] == 0.2);
  CHECK(p[Feature::VerticalDir] == 0.9);
  CHECK(p[Feature::Length] == 7.0);
  CHECK(p[Feature::BboxRatio] == 1.2);
  CHECK_THROWS_AS(build_profile(VortexRegion{}, fs, g, 0.0), ValidationError);
}

TEST_CASE("single cell profile is the mean of its corners") {
  GridMeta meta;
  meta.dims = {4, 4, 4};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VelocityField vel;
  vel.data.resize(meta.vertex_count());
  for (auto& v : vel.data) v = {u(rng), u(rng), u(rng)};
  const FieldSet fs = compute_criteria(meta, vel);
  const CellField cells = cells_of(meta);
  const auto region = VortexRegion::from_cells(1, {cells.linear(1, 2, 0)}, cells);
  const VortexProfile p = build_profile(region, fs, {}, 0.0);

  auto corner_mean = [&](auto&& value) {
    double s = 0.0;
    for (int c = 0; c < 8; ++c) s += value(meta.linear(1 + (c & 1), 2 + ((c >> 1) & 1), 0 + ((c >> 2) & 1)));
    return s / 8.0;
  };
  const double tol = 1e-12;
  CHECK(p[Feature::Lambda2] == doctest::Approx(corner_mean([&](auto v) { return fs.lambda2[v]; })).epsilon(tol));
  CHECK(p[Feature::LambdaCi] == doctest::Approx(corner_mean([&](auto v) { return fs.lambda_ci[v]; })).epsilon(tol));
  CHECK(p[Feature::Q] == doctest::Approx(corner_mean([&](auto v) { return fs.q[v]; })).epsilon(tol));
  CHECK(p[Feature::Delta] == doctest::Approx(corner_mean([&](auto v) { return fs.delta[v]; })).epsilon(tol));
  CHECK(p[Feature::Velocity] == doctest::Approx(corner_mean([&](auto v) { return norm(vel.data[v]); })).epsilon(tol));
  CHECK(p[Feature::Vorticity] ==
        doctest::Approx(corner_mean([&](auto v) { return norm(fs.vorticity[v]); })).epsilon(tol));
  CHECK(p[Feature::Jacobian] == doctest::Approx(corner_mean([&](auto v) { return fs.jacobian_norm[v]; })).epsilon(tol));
  CHECK(p[Feature::Size] == 1.0);
}

TEST_CASE("profile lambda2 matches a flat average over member vertices") {
  GridMeta meta;
  meta.dims = {10, 9, 8};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VelocityField vel;
  vel.data.resize(meta.vertex_count());
  for (auto& v : vel.data) v = {u(rng), u(rng), u(rng)};
  const FieldSet fs = compute_criteria(meta, vel);
  const CellField cells = cells_of(meta);
  std::bernoulli_distribution pick(0.3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<CellId> chosen;
    for (CellId c = 0; c < cells.count(); ++c)
      if (pick(rng)) chosen.push_back(c);
    if (chosen.empty()) continue;
    const auto region = VortexRegion::from_cells(trial, chosen, cells);
    const VortexProfile p = build_profile(region, fs, {}, 0.0);

    std::vector<char> member(meta.vertex_count(), 0);
    for (CellId c : chosen) {
      const std::size_t i = c % 9, j = (c / 9) % 8, k = c / 72;
      for (std::size_t dk = 0; dk < 2; ++dk)
        for (std::size_t dj = 0; dj < 2; ++dj)
          for (std::size_t di = 0; di < 2; ++di) member[meta.linear(i + di, j + dj, k + dk)] = 1;
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t v = 0; v < member.size(); ++v)
      if (member[v]) {
        sum += fs.lambda2[v];
        ++n;
      }
    CHECK(std::abs(p[Feature::Lambda2] - sum / static_cast<double>(n)) <= 1e-12 * std::max(1.0, std::abs(sum / n)));
    CHECK(p[Feature::Size] == static_cast<double>(chosen.size()));

    const VortexProfile again = build_profile(region, fs, {}, 0.0);
    CHECK(again.values == p.values);
  }
}

TEST_CASE("profile statistics") {
  SUBCASE("one profile") {
    std::mt19937_64 rng(1);
    const VortexProfile p = random_profile(rng, 7);
    const auto s = profile_statistics(std::span(&p, 1));
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      CHECK(s[f].min == p.values[f]);
      CHECK(s[f].max == p.values[f]);
      CHECK(s[f].mean == p.values[f]);
      CHECK(s[f].stddev == 0.0);
      CHECK(s[f].argmin == 7);
      CHECK(s[f].argmax == 7);
    }
  }
  SUBCASE("two lambda2 values") {
    std::vector<VortexProfile> ps(2);
    ps[0].id = 3;
    ps[0][Feature::Lambda2] = -1.0;
    ps[1].id = 5;
    ps[1][Feature::Lambda2] = -3.0;
    const auto s = profile_statistics(ps);
    const auto& l = s[static_cast<std::size_t>(Feature::Lambda2)];
    CHECK(l.mean == -2.0);
    CHECK(l.argmin == 5);
    CHECK(l.argmax == 3);
    CHECK(l.stddev == doctest::Approx(1.0));
    // every other feature ties at zero: lowest id wins
    CHECK(s[static_cast<std::size_t>(Feature::Q)].argmin == 3);
    CHECK(s[static_cast<std::size_t>(Feature::Q)].argmax == 3);
  }
  SUBCASE("ties go to the lowest id regardless of order") {
    std::vector<VortexProfile> ps(3);
    ps[0].id = 9;
    ps[1].id = 2;
    ps[2].id = 4;
    for (auto& p : ps) p[Feature::Length] = 1.0;
    const auto s = profile_statistics(ps);
    CHECK(s[static_cast<std::size_t>(Feature::Length)].argmin == 2);
    CHECK(s[static_cast<std::size_t>(Feature::Length)].argmax == 2);
  }
  SUBCASE("random profiles") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<VortexProfile> ps;
      const int n = 1 + trial * 3;
      for (int i = 0; i < n; ++i) ps.push_back(random_profile(rng, 100 - i));
      const auto s = profile_statistics(ps);
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        long double sum = 0.0L, mn = ps[0].values[f], mx = ps[0].values[f];
        for (const auto& p : ps) {
          sum += p.values[f];
          mn = std::min<long double>(mn, p.values[f]);
          mx = std::max<long double>(mx, p.values[f]);
        }
        const long double mean = sum / n;
        long double ss = 0.0L;
        for (const auto& p : ps) ss += (p.values[f] - mean) * (p.values[f] - mean);
        const double sd = static_cast<double>(std::sqrt(ss / n));
        CHECK(std::abs(s[f].mean - static_cast<double>(mean)) <= 1e-12 * std::max(1.0, std::abs((double)mean)));
        CHECK(std::abs(s[f].stddev - sd) <= 1e-12 * std::max(1.0, sd));
        CHECK(s[f].min == static_cast<double>(mn));
        CHECK(s[f].max == static_cast<double>(mx));
        for (const auto& p : ps) {
          if (p.id == s[f].argmin) CHECK(p.values[f] == s[f].min);
          if (p.id == s[f].argmax) CHECK(p.values[f] == s[f].max);
        }
      }
    }
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(profile_statistics(std::span<const VortexProfile>{}), ValidationError);
  }
}

TEST_CASE("profile csv") {
  std::vector<VortexProfile> ps(2);
  ps[0].id = 8;
  ps[0].parent_id = 2;
  ps[0][Feature::Lambda2] = -0.1;
  ps[1].id = 3;
  const std::string csv = profiles_to_csv(ps);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    const auto nl = csv.find('\n', pos);
    lines.push_back(csv.substr(pos, nl - pos));
    pos = nl + 1;
  }
  REQUIRE(lines.size() == 3);
  CHECK(std::count(lines[0].begin(), lines[0].end(), ',') == 20);
  CHECK(lines[0].rfind("id,parent_id,lambda2,", 0) == 0);
  CHECK(lines[1].rfind("3,,", 0) == 0);
  CHECK(lines[2].rfind("8,2,-0.1,", 0) == 0);
  for (const auto& l : lines) CHECK(std::count(l.begin(), l.end(), ',') == 20);
}

TEST_CASE("format_double round trips") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("geometric features under uniform resampling") {
  // helix segment sampled at n and 2n points along arc length
  auto helix = [](std::size_t n) {
    std::vector<Vec3> p;
    for (std::size_t i = 0; i <= n; ++i) {
      const double t = 3.0 * static_cast<double>(i) / static_cast<double>(n);
      p.push_back({4.0 * std::cos(t), 4.0 * std::sin(t), 1.5 * t});
    }
    return p;
  };
  for (std::size_t n : {40u, 80u}) {
    const auto a = geometric_features(helix(n), {});
    const auto b = geometric_features(helix(2 * n), {});
    CHECK(std::abs(b.s_t - a.s_t) <= 0.05 * a.s_t);
    CHECK(std::abs(b.s_p - a.s_p) <= 0.05 * a.s_p);
    CHECK(std::abs(b.s_v - a.s_v) <= 0.05 * a.s_v);
    CHECK(std::abs(b.length - a.length) <= 0.05 * a.length);
    CHECK(std::abs(b.rho - a.rho) <= 0.05 * a.rho);
    // C is a per-point mean: the total turning is what stays fixed
    const double turn_a = a.curvature * static_cast<double>(a.n_points - 2);
    const double turn_b = b.curvature * static_cast<double>(b.n_points - 2);
    CHECK(std::abs(turn_b - turn_a) <= 0.05 * turn_a);
  }
}
