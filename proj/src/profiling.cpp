#include "vortex/profiling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "vortex/errors.hpp"

namespace vortex {

std::optional<std::size_t> feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i)
    if (kFeatureNames[i] == name) return i;
  return std::nullopt;
}

std::vector<std::size_t> region_vertices(const CellField& cells, const VortexRegion& region) {
  std::vector<std::size_t> verts;
  verts.reserve(region.cells.size() * 2);
  for (CellId c : region.cells) {
    const Index3 p = cells.unlinear(c);
    for (int corner = 0; corner < 8; ++corner)
      verts.push_back(cells.meta.linear(p.i + (corner & 1), p.j + ((corner >> 1) & 1), p.k + ((corner >> 2) & 1)));
  }
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  return verts;
}

VortexProfile build_profile(const VortexRegion& region, const FieldSet& fields, const GeometricFeatures& geometry,
                            double c_h_tilde) {
  if (region.cells.empty()) throw ValidationError("profile of an empty region");
  CellField cells;
  cells.meta = fields.meta;
  cells.cdims = fields.meta.cell_dims();
  const auto verts = region_vertices(cells, region);

  VortexProfile p;
  p.id = region.id;
  auto mean_of = [&](const std::vector<double>& field) {
    double s = 0.0;
    for (auto v : verts) s += field[v];
    return s / static_cast<double>(verts.size());
  };
  p[Feature::Lambda2] = mean_of(fields.lambda2);
  p[Feature::LambdaCi] = mean_of(fields.lambda_ci);
  p[Feature::Q] = mean_of(fields.q);
  p[Feature::Delta] = mean_of(fields.delta);
  p[Feature::Divergence] = mean_of(fields.divergence);
  p[Feature::OmegaYPrime] = mean_of(fields.omega_y_prime);
  p[Feature::Size] = static_cast<double>(region.cells.size());
  double vort = 0.0;
  for (auto v : verts) vort += norm(fields.vorticity[v]);
  p[Feature::Vorticity] = vort / static_cast<double>(verts.size());
  p[Feature::Enstrophy] = mean_of(fields.enstrophy);
  p[Feature::Velocity] = mean_of(fields.speed);
  p[Feature::Acceleration] = mean_of(fields.accel_mag);
  p[Feature::Jacobian] = mean_of(fields.jacobian_norm);
  p[Feature::Curvature] = geometry.curvature;
  p[Feature::HairpinCurvature] = c_h_tilde;
  p[Feature::StreamwiseDir] = geometry.s_t;
  p[Feature::SpanwiseDir] = geometry.s_p;
  p[Feature::VerticalDir] = geometry.s_v;
  p[Feature::Length] = geometry.length;
  p[Feature::BboxRatio] = geometry.rho;
  return p;
}

std::array<FeatureStats, kFeatureCount> profile_statistics(std::span<const VortexProfile> profiles) {
  if (profiles.empty()) throw ValidationError("statistics of an empty profile set");
  std::array<FeatureStats, kFeatureCount> out{};
  const auto n = static_cast<double>(profiles.size());
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    FeatureStats s;
    s.min = s.max = profiles[0].values[f];
    s.argmin = s.argmax = profiles[0].id;
    double sum = 0.0;
    for (const auto& p : profiles) {
      const double v = p.values[f];
      sum += v;
      if (v < s.min || (v == s.min && p.id < s.argmin)) {
        s.min = v;
        s.argmin = p.id;
      }
      if (v > s.max || (v == s.max && p.id < s.argmax)) {
        s.max = v;
        s.argmax = p.id;
      }
    }
    s.mean = sum / n;
    double ss = 0.0;
    for (const auto& p : profiles) ss += (p.values[f] - s.mean) * (p.values[f] - s.mean);
    s.stddev = std::sqrt(ss / n);
    out[f] = s;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string profiles_to_csv(std::span<const VortexProfile> profiles) {
  std::vector<const VortexProfile*> rows;
  for (const auto& p : profiles) rows.push_back(&p);
  std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
  std::ostringstream os;
  os << "id,parent_id";
  for (auto name : kFeatureNames) os << ',' << name;
  os << '\n';
  for (const auto* p : rows) {
    os << p->id << ',';
    if (p->parent_id) os << *p->parent_id;
    for (double v : p->values) os << ',' << format_double(v);
    os << '\n';
  }
  return os.str();
}

}  // namespace vortex
