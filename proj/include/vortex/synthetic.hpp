#pragma once

#include <span>
#include <vector>

#include "vortex/field_core.hpp"

namespace vortex::synthetic {

// v = (-y, x, 0) in world coordinates.
VelocityField rigid_rotation(const GridMeta& meta);

// v = (rate * y, 0, 0).
VelocityField pure_shear(const GridMeta& meta, double rate = 1.0);

// Lamb-Oseen vortex with its axis parallel to z through (cx, cy):
// v_theta = circulation / (2 pi r) * (1 - exp(-r^2 / rc^2)).
VelocityField lamb_oseen_z(const GridMeta& meta, double cx, double cy, double circulation, double core_radius);

// Analytic velocity gradient of lamb_oseen_z at a point.
Mat3 lamb_oseen_z_jacobian(const Vec3& p, double cx, double cy, double circulation, double core_radius);

// Vortex tube around a polyline centreline with a Lamb-Oseen swirl profile
// tapered by exp(-(r / (taper * rc))^2) and faded past the centreline ends.
// Vorticity points along the polyline direction for positive circulation.
struct Tube {
  std::vector<Vec3> centerline;
  double circulation = 1.0;
  double core_radius = 1.0;
  double taper = 3.0;
};

VelocityField tube_field(const GridMeta& meta, std::span<const Tube> tubes);

// Adds u += rate * (vertical coordinate) along the streamwise axis.
void add_wall_shear(const GridMeta& meta, VelocityField& vel, double rate);

// Straight polyline from a to b sampled every `step` world units.
std::vector<Vec3> straight_line(const Vec3& a, const Vec3& b, double step);

// Hairpin centreline: two streamwise legs at height z0 joined by a
// semicircular arch of radius `half_width` spanning the spanwise axis and
// inclined `tilt` radians from the wall toward downstream. Corners are
// rounded by corner cutting. Axes follow `roles`.
std::vector<Vec3> hairpin_centerline(const AxisRoles& roles, const Vec3& head_base, double half_width,
                                     double leg_length, double tilt, double step);

// Scalar field -sum depth * exp(-|p - c|^2 / width^2) (negative wells).
struct Well {
  Vec3 center{};
  double depth = 1.0;
  double width = 1.0;
};
std::vector<double> wells_field(const GridMeta& meta, std::span<const Well> wells);

struct Scenario {
  GridMeta meta;
  VelocityField velocity;
};

// n^3 unit-spaced grid (x streamwise, y spanwise, z vertical) holding one
// hairpin tube near the wall, one straight streamwise tube higher up and one
// straight spanwise tube at the wall. Positions scale with n / 96. The
// hairpin has 3/4 of the straight tubes' circulation.
Scenario hairpin_scenario(std::size_t n = 96);

// n^3 unit-spaced grid with three separate straight streamwise tubes.
Scenario three_tubes_scenario(std::size_t n = 64);

}  // namespace vortex::synthetic
