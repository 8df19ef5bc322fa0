#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vortex/errors.hpp"
#include "vortex/field_core.hpp"
#include "vortex/linalg.hpp"
#include "vortex/synthetic.hpp"

using namespace vortex;

namespace {

GridMeta cube(std::size_t n, double h = 1.0, Vec3 origin = {0, 0, 0}) {
  GridMeta m;
  m.dims = {n, n, n};
  m.spacing = {h, h, h};
  m.origin = origin;
  return m;
}

Mat3 random_matrix(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat3 m{};
  for (auto& row : m)
    for (double& v : row) v = g(rng);
  return m;
}

bool interior(const GridMeta& m, const Index3& p) {
  for (int a = 0; a < 3; ++a)
    if (p[a] == 0 || p[a] + 1 == m.dims[a]) return false;
  return true;
}

}  // namespace

TEST_CASE("rigid rotation has the analytic criteria at interior vertices") {
  const GridMeta m = cube(9, 0.5, {-2, -2, -2});
  const FieldSet fs = compute_criteria(m, synthetic::rigid_rotation(m));
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    const Index3 p = m.unlinear(v);
    if (!interior(m, p)) continue;
    CHECK(fs.q[v] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fs.lambda2[v] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(fs.lambda_ci[v] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fs.enstrophy[v] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::abs(fs.divergence[v]) < 1e-12);
    CHECK(fs.vorticity[v][2] == doctest::Approx(2.0));
    const Vec3 x = m.position(p);
    CHECK(fs.accel_mag[v] == doctest::Approx(std::hypot(x[0], x[1])).epsilon(1e-9));
  }
}

TEST_CASE("pure shear has zero Q and lambda2") {
  const GridMeta m = cube(7);
  const FieldSet fs = compute_criteria(m, synthetic::pure_shear(m));
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    CHECK(std::abs(fs.q[v]) < 1e-12);
    CHECK(std::abs(fs.lambda2[v]) < 1e-12);
    CHECK(fs.lambda_ci[v] == 0.0);
    CHECK(fs.vorticity[v][2] == doctest::Approx(-1.0));
  }
}

TEST_CASE("lamb-oseen core is lambda2-negative") {
  GridMeta m = cube(64, 2.0 / 63.0, {-1, -1, -1});
  const double rc = 0.2;
  const FieldSet fs = compute_criteria(m, synthetic::lamb_oseen_z(m, 0.0, 0.0, 1.0, rc));
  int inside = 0;
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    const Vec3 x = m.position(m.unlinear(v));
    if (std::hypot(x[0], x[1]) >= rc) continue;
    ++inside;
    CHECK(fs.lambda2[v] < 0.0);
    CHECK(oracle::lambda2(synthetic::lamb_oseen_z_jacobian(x, 0, 0, 1.0, rc)) < 0.0);
  }
  CHECK(inside > 100);
}

TEST_CASE("jacobian matches a hand-written difference stencil everywhere") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  GridMeta m;
  m.dims = {5, 4, 6};
  m.spacing = {0.3, 0.7, 1.1};
  VelocityField vel;
  for (std::size_t v = 0; v < m.vertex_count(); ++v) vel.data.push_back({u(rng), u(rng), u(rng)});
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    const Index3 p = m.unlinear(v);
    const Mat3 a = compute_jacobian(m, vel, p);
    const Mat3 b = oracle::jacobian(m, vel.data, p.i, p.j, p.k);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) CHECK(a[r][c] == doctest::Approx(b[r][c]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(compute_jacobian(m, vel, Index3{5, 0, 0}), std::out_of_range);
}

TEST_CASE("point criteria agree with the definition oracles on random gradients") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 1000; ++t) {
    const Mat3 j = random_matrix(rng);
    const PointCriteria pc = evaluate_point(j, {0, 0, 0});
    const double scale = 1.0 + frobenius_sq(j);
    CHECK(std::abs(pc.q - oracle::q_criterion(j)) < 1e-9 * scale);
    CHECK(std::abs(pc.lambda2 - oracle::lambda2(j)) < 1e-9 * scale);
    CHECK(std::abs(pc.lambda_ci - oracle::swirling(j)) < 1e-7 * scale);
    CHECK(pc.s2_omega2_eigenvalues[0] >= pc.s2_omega2_eigenvalues[1]);
    CHECK(pc.s2_omega2_eigenvalues[1] >= pc.s2_omega2_eigenvalues[2]);
    // Q = -trace(S^2 + W^2) / 2 holds for any J.
    const double tr = pc.s2_omega2_eigenvalues[0] + pc.s2_omega2_eigenvalues[1] + pc.s2_omega2_eigenvalues[2];
    CHECK(std::abs(pc.q + 0.5 * tr) < 1e-9 * scale);
  }
}

TEST_CASE("swirling strength is zero exactly when the cubic has three real roots") {
  std::mt19937_64 rng(5);
  int real_cases = 0, complex_cases = 0;
  for (int t = 0; t < 1000; ++t) {
    Mat3 j = random_matrix(rng);
    if (t % 2 == 0) j = mat_mul(transpose(j), j);  // symmetric, real spectrum
    const auto roots = oracle::eigenvalues(j);
    double max_im = 0.0;
    for (const auto& r : roots) max_im = std::max(max_im, std::abs(r.imag()));
    const bool complex_pair = max_im > 1e-6;
    const double lci = linalg::swirling_strength(j);
    if (complex_pair) {
      ++complex_cases;
      CHECK(lci == doctest::Approx(max_im).epsilon(1e-6));
    } else {
      ++real_cases;
      CHECK(lci < 1e-6);
    }
  }
  CHECK(real_cases > 100);
  CHECK(complex_cases > 100);
}

TEST_CASE("symmetric eigen solver including near-degenerate spectra") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 300; ++t) {
    Mat3 a = random_matrix(rng);
    a = mat_mul(transpose(a), a);
    std::array<double, 3> r{};
    if (t % 3 == 0) {
      // Repeated roots defeat the polynomial oracle; the spectrum is known.
      a = Mat3{{{2, 1e-14, 0}, {1e-14, 2, 0}, {0, 0, 2 + 1e-15 * t}}};
      r = {2, 2, 2};
    } else {
      auto ref = oracle::eigenvalues(a);
      r = {ref[0].real(), ref[1].real(), ref[2].real()};
      std::sort(r.begin(), r.end(), std::greater<>());
    }
    const auto ev = linalg::symmetric_eigenvalues(a);
    for (int i = 0; i < 3; ++i) CHECK(ev[i] == doctest::Approx(r[i]).epsilon(1e-9));
    const auto full = linalg::symmetric_eigen(a);
    for (int i = 0; i < 3; ++i) {
      const Vec3 v{full.vectors[0][i], full.vectors[1][i], full.vectors[2][i]};
      const Vec3 av = mat_vec(a, v);
      for (int c = 0; c < 3; ++c) CHECK(std::abs(av[c] - full.values[i] * v[c]) < 1e-9 * (1 + std::abs(full.values[0])));
    }
  }
}

TEST_CASE("divergence of a solenoidal field shrinks with the grid spacing") {
  double prev = 0.0;
  for (int level = 0; level < 2; ++level) {
    const std::size_t n = level == 0 ? 17 : 33;
    const GridMeta m = cube(n, 2.0 / static_cast<double>(n - 1), {-1, -1, -1});
    VelocityField vel;
    for (std::size_t v = 0; v < m.vertex_count(); ++v) {
      const Vec3 x = m.position(m.unlinear(v));
      vel.data.push_back({std::sin(x[0]) * std::cos(2 * x[1]), -0.5 * std::cos(x[0]) * std::sin(2 * x[1]), 0.0});
    }
    const FieldSet fs = compute_criteria(m, vel);
    double worst = 0.0;
    for (std::size_t v = 0; v < m.vertex_count(); ++v)
      if (interior(m, m.unlinear(v))) worst = std::max(worst, std::abs(fs.divergence[v]));
    if (level == 1) CHECK(prev / worst >= 3.0);
    prev = worst;
  }
}

TEST_CASE("omega_y prime removes the slab mean") {
  GridMeta m = cube(6);
  SUBCASE("constant spanwise vorticity") {
    std::vector<Vec3> w(m.vertex_count(), Vec3{0.3, 4.0, -1.0});
    for (double v : compute_omega_y_prime(m, w)) CHECK(std::abs(v) < 1e-14);
  }
  SUBCASE("alternating +-1 per slab") {
    std::vector<Vec3> w(m.vertex_count());
    for (std::size_t v = 0; v < w.size(); ++v) w[v][1] = (v % 2 == 0) ? 1.0 : -1.0;
    const auto o = compute_omega_y_prime(m, w);
    for (std::size_t v = 0; v < w.size(); ++v) CHECK(o[v] == doctest::Approx(w[v][1]));
  }
  SUBCASE("shear plus tube field against the slab oracle, permuted roles") {
    m.dims = {12, 10, 8};
    m.axis_roles = {1, 2, 0};
    synthetic::Tube t{synthetic::straight_line({0, 5, 4}, {11, 5, 4}, 0.5), 3.0, 1.5, 3.0};
    VelocityField vel = synthetic::tube_field(m, std::span(&t, 1));
    synthetic::add_wall_shear(m, vel, 0.2);
    const FieldSet fs = compute_criteria(m, vel);
    const auto ref = oracle::omega_y_prime(m, fs.vorticity);
    for (std::size_t v = 0; v < ref.size(); ++v) CHECK(std::abs(fs.omega_y_prime[v] - ref[v]) < 1e-12);
  }
}

TEST_CASE("non-finite velocity is rejected with the vertex named") {
  const GridMeta m = cube(3);
  VelocityField vel = synthetic::rigid_rotation(m);
  vel.data[7][1] = std::nan("");
  try {
    (void)compute_criteria(m, vel);
    FAIL("no error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("(1, 2, 0)") != std::string::npos);
  }
}

TEST_CASE("grid validation") {
  GridMeta m = cube(3);
  m.dims[1] = 1;
  CHECK_THROWS_AS(m.validate(), ValidationError);
  m = cube(3);
  m.spacing[2] = 0.0;
  CHECK_THROWS_AS(m.validate(), ValidationError);
  m = cube(3);
  m.axis_roles = {0, 0, 2};
  CHECK_THROWS_AS(m.validate(), ValidationError);
}

TEST_CASE("trilinear sampling reproduces linear fields") {
  GridMeta m;
  m.dims = {4, 5, 6};
  m.spacing = {0.5, 1.0, 2.0};
  m.origin = {1, -1, 0};
  std::vector<double> f(m.vertex_count());
  for (std::size_t v = 0; v < f.size(); ++v) {
    const Vec3 x = m.position(m.unlinear(v));
    f[v] = 2 * x[0] - x[1] + 0.5 * x[2] + 3;
  }
  const Vec3 p{1.7, 0.2, 3.3};
  CHECK(sample_trilinear(m, f, p) == doctest::Approx(2 * 1.7 - 0.2 + 0.5 * 3.3 + 3));
  // clamped outside
  CHECK(sample_trilinear(m, f, {-10, -1, 0}) == doctest::Approx(2 * 1 + 1 + 3));
}
