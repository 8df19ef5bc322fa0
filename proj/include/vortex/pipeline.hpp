#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vortex/bundle.hpp"
#include "vortex/dataset.hpp"
#include "vortex/thresholding.hpp"

namespace vortex {

struct PipelineParams {
  RefineParams refine;
  ExpandParams expand;
  double noise_frac = 1e-4;
  SplitParams split;
  bool simplify = true;
  int simplify_min_nb1 = 6;
  int simplify_min_nb2 = 8;
  int smooth_iterations = 10;
  double smooth_factor = 0.5;
  SkeletonParams skeleton;
  HairpinParams hairpin;
  std::optional<ClusterRequest> cluster;  // clustering runs only when set

  // Number of histogram bins for both refinement and the initial expansion;
  // the threshold bin moves to the 90th percentile bin.
  void set_bins(std::size_t n);
  void validate() const;

  [[nodiscard]] nlohmann::json to_json() const;
  static PipelineParams from_json(const nlohmann::json& j);
};

enum class Stage { Fields, Extract, Split, Profile, Hairpin, Cluster, Export };

const char* stage_name(Stage s);
std::optional<Stage> parse_stage(std::string_view name);

struct ExtractResult {
  double lambda2_init = 0.0;
  std::size_t refine_iterations = 0;
  StopReason stop_reason = StopReason::IterationCap;
  Lambda2Steps steps;
  std::vector<VortexRegion> regions;
};

struct ProfileResult {
  std::vector<VortexProfile> profiles;  // one per leaf, ascending id
  std::map<std::int64_t, SurfaceMesh> meshes;
  std::map<std::int64_t, Skeleton> skeletons;
};

struct PipelineState {
  DatasetDescriptor descriptor;
  std::string digest;
  GridMeta meta;
  std::optional<FieldSet> fields;
  std::optional<ExtractResult> extract;
  std::optional<VortexTree> tree;
  std::optional<ProfileResult> profile;
  std::optional<std::vector<HairpinScores>> hairpin;
  std::optional<ClusterResult> cluster;
};

// Runs one stage on `state`. Export is a no-op here (see make_bundle).
// Errors are rethrown as StageError carrying the stage name and exit code.
void run_stage(Stage stage, PipelineState& state, const PipelineParams& params);

ExportBundle make_bundle(const PipelineState& state, const PipelineParams& params);

// Every stage in order, then writes the bundle to out_dir.
ExportBundle run_pipeline(const DatasetDescriptor& descriptor, const PipelineParams& params,
                          const std::filesystem::path& out_dir);

// Stage caches in a work directory. Loading a stage restores exactly what the
// stage produced, so stage-by-stage runs match a single full run.
void save_stage_cache(Stage stage, const PipelineState& state, const std::filesystem::path& work_dir);
void load_stage_cache(Stage stage, PipelineState& state, const std::filesystem::path& work_dir);

// Loads the caches `stage` consumes. Fields stage inputs come from the
// descriptor, so nothing is loaded for it.
void load_prerequisites(Stage stage, PipelineState& state, const std::filesystem::path& work_dir,
                        const PipelineParams& params);

}  // namespace vortex
