#include "vortex/hairpin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vortex/errors.hpp"

namespace vortex {

bool step1_direction_filter(double s_t, double s_p, double s_v, double t1) {
  return s_t <= t1 && s_p <= t1 && s_v <= t1;
}

bool step1_direction_filter(const VortexProfile& profile, double t1) {
  return step1_direction_filter(profile[Feature::StreamwiseDir], profile[Feature::SpanwiseDir],
                                profile[Feature::VerticalDir], t1);
}

double depth_weight(double z, double z_min, double z_max) {
  if (!(z_max > z_min)) return 1.0;
  return std::clamp(1.0 - (z - z_min) / (z_max - z_min), 0.0, 1.0);
}

double rms_omega_y(std::span<const double> samples, std::span<const double> heights, double z_min, double z_max) {
  if (samples.empty()) throw ValidationError("rms_omega_y needs at least one sample");
  if (samples.size() != heights.size()) throw ValidationError("rms_omega_y: samples and heights differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double weighted = samples[i] * depth_weight(heights[i], z_min, z_max);
    const double damped = weighted >= 0.0 ? weighted : 0.1 * weighted;
    sum += damped * damped;
  }
  return std::sqrt(sum / static_cast<double>(samples.size()));
}

double rms_omega_y(const Skeleton& skeleton, const GridMeta& meta) {
  const int vert = meta.axis_roles.vertical;
  std::vector<double> samples;
  std::vector<double> heights;
  for (auto i : skeleton.main_path) {
    samples.push_back(skeleton.nodes[i].omega_y_prime);
    heights.push_back(skeleton.nodes[i].position[vert]);
  }
  return rms_omega_y(samples, heights, meta.origin[vert], meta.extent_max()[vert]);
}

double hairpin_curvature(const GeometricFeatures& f) { return f.curvature * (1.0 - f.s_t) * f.s_p * f.s_v; }

double adjusted_hairpin_curvature(const GeometricFeatures& f, double c_h) {
  if (f.n_points < 2) throw ValidationError("adjusted hairpin curvature needs n >= 2");
  return c_h * f.rho * f.length / std::pow(static_cast<double>(f.n_points), 0.25);
}

std::vector<HairpinScores> select_candidates(std::span<const VortexProfile> profiles,
                                             std::span<const Skeleton> skeletons, const GridMeta& meta,
                                             const HairpinParams& params) {
  if (profiles.size() != skeletons.size()) throw ValidationError("one skeleton per profile required");
  const double min_len = params.min_len_frac * meta.domain_diagonal();
  std::vector<HairpinScores> out;
  out.reserve(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const VortexProfile& p = profiles[i];
    HairpinScores s;
    s.vortex_id = p.id;
    GeometricFeatures f;
    f.curvature = p[Feature::Curvature];
    f.s_t = p[Feature::StreamwiseDir];
    f.s_p = p[Feature::SpanwiseDir];
    f.s_v = p[Feature::VerticalDir];
    f.length = p[Feature::Length];
    f.rho = p[Feature::BboxRatio];
    s.c_h = hairpin_curvature(f);
    s.c_h_tilde = p[Feature::HairpinCurvature];
    s.rms_oy = rms_omega_y(skeletons[i], meta);
    s.passed_step1 = step1_direction_filter(p, params.t1);
    s.passed_step2 = s.rms_oy > 0.0;
    s.passed_step3 = s.c_h_tilde > params.c_h_min && f.length >= min_len;
    s.is_candidate = s.passed_step1 && s.passed_step2 && s.passed_step3;
    out.push_back(s);
  }
  return out;
}

std::string hairpin_to_csv(std::span<const HairpinScores> scores) {
  std::ostringstream os;
  os << "id,rms_oy,c_h,c_h_tilde,step1,step2,step3,is_candidate\n";
  for (const auto& s : scores) {
    os << s.vortex_id << ',' << format_double(s.rms_oy) << ',' << format_double(s.c_h) << ','
       << format_double(s.c_h_tilde) << ',' << int(s.passed_step1) << ',' << int(s.passed_step2) << ','
       << int(s.passed_step3) << ',' << int(s.is_candidate) << '\n';
  }
  return os.str();
}

}  // namespace vortex
