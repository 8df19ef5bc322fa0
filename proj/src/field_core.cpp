#include "vortex/field_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"
#include "vortex/errors.hpp"
#include "vortex/linalg.hpp"

namespace vortex {

bool AxisRoles::is_bijection() const noexcept {
  const std::array<int, 3> r{streamwise, spanwise, vertical};
  std::array<bool, 3> seen{};
  for (int a : r) {
    if (a < 0 || a > 2 || seen[a]) return false;
    seen[a] = true;
  }
  return true;
}

void GridMeta::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 2) throw ValidationError("grid dims must be >= 2 along every axis");
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
      throw ValidationError("grid spacing must be positive and finite");
    if (!std::isfinite(origin[a])) throw ValidationError("grid origin must be finite");
  }
  if (!axis_roles.is_bijection())
    throw ValidationError("axis_roles must map streamwise/spanwise/vertical onto distinct axes 0..2");
}

namespace {

// dv/dx_axis at a vertex.
Vec3 axis_derivative(const GridMeta& meta, const VelocityField& vel, const Index3& v, int axis) {
  const std::size_t n = meta.dims[axis];
  const std::size_t c = v[axis];
  Index3 lo = v;
  Index3 hi = v;
  double h = meta.spacing[axis];
  auto set = [axis](Index3& idx, std::size_t value) {
    if (axis == 0) idx.i = value;
    else if (axis == 1) idx.j = value;
    else idx.k = value;
  };
  if (c == 0) {
    set(hi, 1);
  } else if (c == n - 1) {
    set(lo, n - 2);
  } else {
    set(lo, c - 1);
    set(hi, c + 1);
    h *= 2.0;
  }
  const Vec3& a = vel.data[meta.linear(hi)];
  const Vec3& b = vel.data[meta.linear(lo)];
  return {(a[0] - b[0]) / h, (a[1] - b[1]) / h, (a[2] - b[2]) / h};
}

Mat3 jacobian_unchecked(const GridMeta& meta, const VelocityField& vel, const Index3& v) {
  Mat3 j{};
  for (int axis = 0; axis < 3; ++axis) {
    const Vec3 d = axis_derivative(meta, vel, v, axis);
    for (int comp = 0; comp < 3; ++comp) j[comp][axis] = d[comp];
  }
  return j;
}

}  // namespace

Mat3 compute_jacobian(const GridMeta& meta, const VelocityField& vel, const Index3& vertex) {
  if (vertex.i >= meta.dims[0] || vertex.j >= meta.dims[1] || vertex.k >= meta.dims[2]) {
    std::ostringstream os;
    os << "vertex (" << vertex.i << ", " << vertex.j << ", " << vertex.k << ") outside grid " << meta.dims[0]
       << "x" << meta.dims[1] << "x" << meta.dims[2];
    throw std::out_of_range(os.str());
  }
  if (vel.data.size() != meta.vertex_count()) throw ValidationError("velocity length does not match grid");
  return jacobian_unchecked(meta, vel, vertex);
}

PointCriteria evaluate_point(const Mat3& j, const Vec3& velocity) {
  Mat3 s{};
  Mat3 w{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      s[a][b] = 0.5 * (j[a][b] + j[b][a]);
      w[a][b] = 0.5 * (j[a][b] - j[b][a]);
    }
  const Mat3 s2 = mat_mul(s, s);
  const Mat3 w2 = mat_mul(w, w);
  Mat3 m{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) m[a][b] = s2[a][b] + w2[a][b];

  PointCriteria out;
  out.q = 0.5 * (frobenius_sq(w) - frobenius_sq(s));
  const double half_det = determinant(j) / 2.0;
  out.delta = std::pow(out.q / 3.0, 3) + half_det * half_det;
  out.s2_omega2_eigenvalues = linalg::symmetric_eigenvalues(m);
  out.lambda2 = out.s2_omega2_eigenvalues[1];
  out.lambda_ci = linalg::swirling_strength(j);
  out.divergence = trace(j);
  out.vorticity = {j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]};
  out.enstrophy = 0.5 * dot(out.vorticity, out.vorticity);
  out.acceleration = mat_vec(j, velocity);
  return out;
}

FieldSet compute_criteria(const GridMeta& meta, const VelocityField& vel) {
  meta.validate();
  const std::size_t n = meta.vertex_count();
  if (vel.data.size() != n) {
    std::ostringstream os;
    os << "velocity has " << vel.data.size() << " vectors, grid has " << n << " vertices";
    throw ValidationError(os.str());
  }
  for (std::size_t v = 0; v < n; ++v) {
    for (int c = 0; c < 3; ++c) {
      if (!std::isfinite(vel.data[v][c])) {
        const Index3 idx = meta.unlinear(v);
        std::ostringstream os;
        os << "non-finite velocity component " << c << " at vertex (" << idx.i << ", " << idx.j << ", " << idx.k
           << ")";
        throw ValidationError(os.str());
      }
    }
  }

  FieldSet fs;
  fs.meta = meta;
  fs.velocity = vel;
  for (auto* arr : {&fs.lambda2, &fs.q, &fs.delta, &fs.lambda_ci, &fs.divergence, &fs.enstrophy, &fs.speed,
                    &fs.accel_mag, &fs.jacobian_norm})
    arr->assign(n, 0.0);
  fs.vorticity.assign(n, Vec3{});

  detail::parallel_for(n, [&](std::size_t v) {
    const Mat3 j = jacobian_unchecked(meta, vel, meta.unlinear(v));
    const PointCriteria pc = evaluate_point(j, vel.data[v]);
    fs.lambda2[v] = pc.lambda2;
    fs.q[v] = pc.q;
    fs.delta[v] = pc.delta;
    fs.lambda_ci[v] = pc.lambda_ci;
    fs.divergence[v] = pc.divergence;
    fs.enstrophy[v] = pc.enstrophy;
    fs.vorticity[v] = pc.vorticity;
    fs.speed[v] = norm(vel.data[v]);
    fs.accel_mag[v] = norm(pc.acceleration);
    fs.jacobian_norm[v] = std::sqrt(frobenius_sq(j));
  });
  fs.omega_y_prime = compute_omega_y_prime(meta, fs.vorticity);
  return fs;
}

std::vector<double> compute_omega_y_prime(const GridMeta& meta, std::span<const Vec3> vorticity) {
  meta.validate();
  if (vorticity.size() != meta.vertex_count()) throw ValidationError("vorticity length does not match grid");
  const int span_axis = meta.axis_roles.spanwise;
  const int vert_axis = meta.axis_roles.vertical;
  const std::size_t levels = meta.dims[vert_axis];

  std::vector<double> sums(levels, 0.0);
  std::vector<std::size_t> counts(levels, 0);
  for (std::size_t v = 0; v < vorticity.size(); ++v) {
    const std::size_t level = meta.unlinear(v)[vert_axis];
    sums[level] += vorticity[v][span_axis];
    ++counts[level];
  }
  std::vector<double> out(vorticity.size());
  for (std::size_t v = 0; v < vorticity.size(); ++v) {
    const std::size_t level = meta.unlinear(v)[vert_axis];
    out[v] = vorticity[v][span_axis] - sums[level] / static_cast<double>(counts[level]);
  }
  return out;
}

double sample_trilinear(const GridMeta& meta, std::span<const double> field, const Vec3& p) {
  std::array<std::size_t, 3> i0{};
  std::array<double, 3> t{};
  for (int a = 0; a < 3; ++a) {
    const double u = std::clamp((p[a] - meta.origin[a]) / meta.spacing[a], 0.0,
                                static_cast<double>(meta.dims[a] - 1));
    const auto base = std::min(static_cast<std::size_t>(std::floor(u)), meta.dims[a] - 2);
    i0[a] = base;
    t[a] = u - static_cast<double>(base);
  }
  double acc = 0.0;
  for (int c = 0; c < 8; ++c) {
    const std::size_t di = c & 1;
    const std::size_t dj = (c >> 1) & 1;
    const std::size_t dk = (c >> 2) & 1;
    const double w = (di ? t[0] : 1.0 - t[0]) * (dj ? t[1] : 1.0 - t[1]) * (dk ? t[2] : 1.0 - t[2]);
    acc += w * field[meta.linear(i0[0] + di, i0[1] + dj, i0[2] + dk)];
  }
  return acc;
}

}  // namespace vortex
