#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vortex/profiling.hpp"

namespace vortex {

struct HairpinParams {
  double t1 = 0.99;             // direction threshold
  double c_h_min = 1.0;         // adjusted hairpin curvature threshold
  double min_len_frac = 0.01;   // of the domain diagonal
};

struct HairpinScores {
  std::int64_t vortex_id = 0;
  double rms_oy = 0.0;
  double c_h = 0.0;
  double c_h_tilde = 0.0;
  bool passed_step1 = false;
  bool passed_step2 = false;
  bool passed_step3 = false;
  bool is_candidate = false;
};

// Step 1: rejects vortices aligned with a single axis.
bool step1_direction_filter(double s_t, double s_p, double s_v, double t1 = 0.99);
bool step1_direction_filter(const VortexProfile& profile, double t1 = 0.99);

// Depth weight 1 - (z - zmin)/(zmax - zmin), clamped to [0, 1].
double depth_weight(double z, double z_min, double z_max);

// RMS of the depth-weighted, sign-damped spanwise vorticity fluctuation
// (negative samples scaled by 0.1) over a list of samples and their vertical
// coordinates. Throws ValidationError on empty input.
double rms_omega_y(std::span<const double> samples, std::span<const double> heights, double z_min, double z_max);

// Same, over the skeleton's main path.
double rms_omega_y(const Skeleton& skeleton, const GridMeta& meta);

// C_h = C (1 - S_t) S_p S_v.
double hairpin_curvature(const GeometricFeatures& f);

// C~_h = C_h rho L / n^(1/4).
double adjusted_hairpin_curvature(const GeometricFeatures& f, double c_h);

// Evaluates Steps 1-3 for every profile; skeletons[i] belongs to profiles[i].
std::vector<HairpinScores> select_candidates(std::span<const VortexProfile> profiles,
                                             std::span<const Skeleton> skeletons, const GridMeta& meta,
                                             const HairpinParams& params = {});

std::string hairpin_to_csv(std::span<const HairpinScores> scores);

}  // namespace vortex
