#include "vortex/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "parallel.hpp"

namespace vortex::synthetic {

namespace {

template <typename Fn>
VelocityField sample(const GridMeta& meta, Fn&& fn) {
  VelocityField v;
  v.data.resize(meta.vertex_count());
  detail::parallel_for(v.data.size(), [&](std::size_t i) { v.data[i] = fn(meta.position(meta.unlinear(i))); });
  return v;
}

Vec3 unit_axis(int axis) {
  Vec3 e{};
  e[axis] = 1.0;
  return e;
}

double swirl(double r, double circulation, double rc) {
  if (r < 1e-12) return 0.0;
  return circulation / (2.0 * std::numbers::pi * r) * (1.0 - std::exp(-r * r / (rc * rc)));
}

std::vector<Vec3> chaikin(const std::vector<Vec3>& pts) {
  if (pts.size() < 3) return pts;
  std::vector<Vec3> out{pts.front()};
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec3& a = pts[i];
    const Vec3& b = pts[i + 1];
    if (i > 0) out.push_back(0.75 * a + 0.25 * b);
    if (i + 2 < pts.size()) out.push_back(0.25 * a + 0.75 * b);
  }
  out.push_back(pts.back());
  return out;
}

std::vector<Vec3> resample(const std::vector<Vec3>& pts, double step) {
  std::vector<Vec3> out{pts.front()};
  double next = step;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec3 d = pts[i + 1] - pts[i];
    const double len = norm(d);
    double pos = next;
    for (; pos <= len; pos += step) out.push_back(pts[i] + (pos / len) * d);
    next = pos - len;
  }
  if (distance(out.back(), pts.back()) > 1e-9 * step) out.push_back(pts.back());
  return out;
}

}  // namespace

VelocityField rigid_rotation(const GridMeta& meta) {
  return sample(meta, [](const Vec3& p) { return Vec3{-p[1], p[0], 0.0}; });
}

VelocityField pure_shear(const GridMeta& meta, double rate) {
  return sample(meta, [rate](const Vec3& p) { return Vec3{rate * p[1], 0.0, 0.0}; });
}

VelocityField lamb_oseen_z(const GridMeta& meta, double cx, double cy, double circulation, double core_radius) {
  return sample(meta, [=](const Vec3& p) {
    const double x = p[0] - cx;
    const double y = p[1] - cy;
    const double r = std::hypot(x, y);
    if (r < 1e-12) return Vec3{};
    const double s = swirl(r, circulation, core_radius) / r;
    return Vec3{-s * y, s * x, 0.0};
  });
}

Mat3 lamb_oseen_z_jacobian(const Vec3& p, double cx, double cy, double circulation, double rc) {
  const double x = p[0] - cx;
  const double y = p[1] - cy;
  const double r = std::hypot(x, y);
  const double k = circulation / (2.0 * std::numbers::pi);
  Mat3 j{};
  if (r < 1e-12) {
    const double g0 = k / (rc * rc);
    j[0][1] = -g0;
    j[1][0] = g0;
    return j;
  }
  const double e = std::exp(-r * r / (rc * rc));
  const double g = k / (r * r) * (1.0 - e);
  const double dg = k * (-2.0 / (r * r * r) * (1.0 - e) + 2.0 / (r * rc * rc) * e);
  j[0][0] = -y * dg * x / r;
  j[0][1] = -g - y * dg * y / r;
  j[1][0] = g + x * dg * x / r;
  j[1][1] = x * dg * y / r;
  return j;
}

VelocityField tube_field(const GridMeta& meta, std::span<const Tube> tubes) {
  struct Prepared {
    const Tube* tube;
    Vec3 lo;
    Vec3 hi;
  };
  std::vector<Prepared> prepared;
  for (const auto& t : tubes) {
    Prepared p{&t, {}, {}};
    const double reach = 4.0 * t.taper * t.core_radius;
    for (int a = 0; a < 3; ++a) {
      p.lo[a] = std::numeric_limits<double>::infinity();
      p.hi[a] = -p.lo[a];
      for (const auto& c : t.centerline) {
        p.lo[a] = std::min(p.lo[a], c[a] - reach);
        p.hi[a] = std::max(p.hi[a], c[a] + reach);
      }
    }
    prepared.push_back(p);
  }

  return sample(meta, [&](const Vec3& p) {
    Vec3 v{};
    for (const auto& prep : prepared) {
      if (p[0] < prep.lo[0] || p[1] < prep.lo[1] || p[2] < prep.lo[2] || p[0] > prep.hi[0] || p[1] > prep.hi[1] ||
          p[2] > prep.hi[2])
        continue;
      const Tube& t = *prep.tube;
      const auto& c = t.centerline;
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_seg = 0;
      double best_raw = 0.0;
      for (std::size_t s = 0; s + 1 < c.size(); ++s) {
        const Vec3 d = c[s + 1] - c[s];
        const double len2 = dot(d, d);
        const double raw = dot(p - c[s], d) / len2;
        const double tc = std::clamp(raw, 0.0, 1.0);
        const double dist = norm(p - (c[s] + tc * d));
        if (dist < best) {
          best = dist;
          best_seg = s;
          best_raw = raw;
        }
      }
      const Vec3 d = c[best_seg + 1] - c[best_seg];
      const double len = norm(d);
      const Vec3 tangent = (1.0 / len) * d;
      double overshoot = 0.0;
      if (best_seg == 0 && best_raw < 0.0) overshoot = -best_raw * len;
      if (best_seg + 2 == c.size() && best_raw > 1.0) overshoot = (best_raw - 1.0) * len;
      const Vec3 foot = c[best_seg] + std::clamp(best_raw, 0.0, 1.0) * d;
      Vec3 radial = p - foot;
      radial = radial - dot(radial, tangent) * tangent;
      const double r = norm(radial);
      if (r < 1e-12) continue;
      const double rc = t.core_radius;
      const double taper = std::exp(-std::pow(r / (t.taper * rc), 2));
      const double fade = std::exp(-std::pow(overshoot / rc, 2));
      const double speed = swirl(r, t.circulation, rc) * taper * fade;
      v = v + (speed / r) * cross(tangent, radial);
    }
    return v;
  });
}

void add_wall_shear(const GridMeta& meta, VelocityField& vel, double rate) {
  const int s = meta.axis_roles.streamwise;
  const int z = meta.axis_roles.vertical;
  for (std::size_t i = 0; i < vel.data.size(); ++i) {
    const Vec3 p = meta.position(meta.unlinear(i));
    vel.data[i][s] += rate * (p[z] - meta.origin[z]);
  }
}

std::vector<Vec3> straight_line(const Vec3& a, const Vec3& b, double step) { return resample({a, b}, step); }

std::vector<Vec3> hairpin_centerline(const AxisRoles& roles, const Vec3& base, double half_width, double leg_length,
                                     double tilt, double step) {
  const Vec3 es = unit_axis(roles.streamwise);
  const Vec3 ep = unit_axis(roles.spanwise);
  const Vec3 ev = unit_axis(roles.vertical);
  const Vec3 incline = std::cos(tilt) * es + std::sin(tilt) * ev;
  std::vector<Vec3> coarse;
  coarse.push_back(base - half_width * ep - leg_length * es);
  const int arch_points = 24;
  for (int i = 0; i <= arch_points; ++i) {
    const double th = std::numbers::pi * i / arch_points;
    coarse.push_back(base - (half_width * std::cos(th)) * ep + (half_width * std::sin(th)) * incline);
  }
  coarse.push_back(base + half_width * ep - leg_length * es);
  for (int i = 0; i < 3; ++i) coarse = chaikin(coarse);
  return resample(coarse, step);
}

std::vector<double> wells_field(const GridMeta& meta, std::span<const Well> wells) {
  std::vector<double> out(meta.vertex_count(), 0.0);
  detail::parallel_for(out.size(), [&](std::size_t i) {
    const Vec3 p = meta.position(meta.unlinear(i));
    double s = 0.0;
    for (const auto& w : wells) {
      const Vec3 d = p - w.center;
      s -= w.depth * std::exp(-dot(d, d) / (w.width * w.width));
    }
    out[i] = s;
  });
  return out;
}

Scenario hairpin_scenario(std::size_t n) {
  Scenario sc;
  sc.meta.dims = {n, n, n};
  const double k = static_cast<double>(n) / 96.0;
  std::vector<Tube> tubes(3);
  tubes[0].centerline = hairpin_centerline(sc.meta.axis_roles, {45 * k, 48 * k, 8 * k}, 15 * k, 25 * k,
                                           std::numbers::pi / 4, 0.5);
  tubes[1].centerline = straight_line({10 * k, 80 * k, 40 * k}, {86 * k, 80 * k, 40 * k}, 0.5);
  tubes[2].centerline = straight_line({80 * k, 10 * k, 6 * k}, {80 * k, 86 * k, 6 * k}, 0.5);
  for (auto& t : tubes) {
    t.circulation = 20.0;
    t.core_radius = 2.5 * k;
  }
  // Weaker than the straight tubes so its whole core sits between two
  // isovalue steps instead of straddling the deepest one.
  tubes[0].circulation = 15.0;
  sc.velocity = tube_field(sc.meta, tubes);
  return sc;
}

Scenario three_tubes_scenario(std::size_t n) {
  Scenario sc;
  sc.meta.dims = {n, n, n};
  const double k = static_cast<double>(n) / 64.0;
  std::vector<Tube> tubes(3);
  const std::array<std::array<double, 2>, 3> yz{{{16, 16}, {48, 24}, {32, 48}}};
  for (std::size_t i = 0; i < 3; ++i) {
    tubes[i].centerline = straight_line({8 * k, yz[i][0] * k, yz[i][1] * k}, {56 * k, yz[i][0] * k, yz[i][1] * k}, 0.5);
    tubes[i].circulation = 20.0;
    tubes[i].core_radius = 2.5 * k;
  }
  sc.velocity = tube_field(sc.meta, tubes);
  return sc;
}

}  // namespace vortex::synthetic
