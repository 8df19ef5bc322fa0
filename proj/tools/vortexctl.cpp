// vortexctl: command line front end for the vortex pipeline.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "vortex/errors.hpp"
#include "vortex/pipeline.hpp"
#include "vortex/service.hpp"
#include "vortex/synthetic.hpp"

namespace fs = std::filesystem;
using namespace vortex;

namespace {

struct Overrides {
  std::optional<double> vsf, t1, chmin, noise_frac, perplexity, eps;
  std::optional<std::size_t> bins, min_pts;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> preset;
  std::vector<std::string> attributes;
  std::optional<std::string> scope;
  bool no_simplify = false;
  bool no_cluster = false;

  void add_to(CLI::App* app) {
    app->add_option("--vsf", vsf, "vortex size factor (default 3.5)");
    app->add_option("--t1", t1, "direction threshold of the hairpin filter (default 0.99)");
    app->add_option("--chmin", chmin, "adjusted hairpin curvature threshold (default 1.0)");
    app->add_option("--bins", bins, "histogram bins (default 100)");
    app->add_option("--noise-frac", noise_frac, "noise region fraction of all cells (default 0.0001)");
    app->add_option("--perplexity", perplexity, "t-SNE perplexity (default 12)");
    app->add_option("--eps", eps, "DBSCAN radius (default: k-distance elbow)");
    app->add_option("--min-pts", min_pts, "DBSCAN core threshold (default 4)");
    app->add_option("--seed", seed, "t-SNE seed (default 0)");
    app->add_option("--preset", preset, "cluster attribute preset")->check(CLI::IsMember({"couette", "benard"}));
    app->add_option("--attributes", attributes, "cluster attributes (enables clustering)")->delimiter(',');
    app->add_option("--scope", scope, "cluster scope")->check(CLI::IsMember({"all", "hairpin"}));
    app->add_flag("--no-simplify", no_simplify, "keep leaf regions unsimplified");
    app->add_flag("--no-cluster", no_cluster, "disable clustering");
  }

  void apply(PipelineParams& p) const {
    if (vsf) p.split.vsf = *vsf;
    if (t1) p.hairpin.t1 = *t1;
    if (chmin) p.hairpin.c_h_min = *chmin;
    if (bins) p.set_bins(*bins);
    if (noise_frac) p.noise_frac = *noise_frac;
    if (no_simplify) p.simplify = false;
    if (preset || !attributes.empty()) {
      if (!p.cluster) p.cluster = ClusterRequest{};
      p.cluster->attributes = preset ? preset_attributes(*preset) : attributes;
    }
    if (p.cluster) {
      if (perplexity) p.cluster->perplexity = *perplexity;
      if (eps) p.cluster->eps = *eps;
      if (min_pts) p.cluster->min_pts = *min_pts;
      if (seed) p.cluster->seed = *seed;
      if (scope) p.cluster->scope = *scope == "hairpin" ? ClusterScope::HairpinCandidates : ClusterScope::AllLeaves;
    }
    if (no_cluster) p.cluster.reset();
  }
};

// Stage runs keep their parameters in <work>/params.json so later stages and
// the export see what earlier stages used.
PipelineParams stage_params(const fs::path& work, Stage stage, const Overrides& o) {
  PipelineParams p;
  const fs::path file = work / "params.json";
  if (stage != Stage::Fields && fs::exists(file)) p = PipelineParams::from_json(nlohmann::json::parse(read_file(file)));
  o.apply(p);
  p.validate();
  write_file(file, dump_json(p.to_json()));
  return p;
}

int run_stage_command(Stage stage, const fs::path& descriptor, const fs::path& work, const fs::path& out,
                      const Overrides& o) {
  const PipelineParams params = stage_params(work, stage, o);
  PipelineState st;
  if (stage == Stage::Fields) {
    if (descriptor.empty()) throw ValidationError("--descriptor is required for the fields stage");
    st.descriptor = DatasetDescriptor::load(descriptor);
  }
  load_prerequisites(stage, st, work, params);
  if (stage == Stage::Export) {
    if (out.empty()) throw ValidationError("--out is required for export");
    write_bundle(make_bundle(st, params), out);
    spdlog::info("bundle written to {}", out.string());
    return kExitOk;
  }
  run_stage(stage, st, params);
  save_stage_cache(stage, st, work);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vortex extraction, separation, profiling and hairpin classification"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  fs::path descriptor, work = "work", out;
  Overrides overrides;
  std::vector<std::pair<CLI::App*, Stage>> stage_cmds;
  const std::vector<std::pair<Stage, std::string>> stages{
      {Stage::Fields, "load the velocity field and compute the per-vertex criteria"},
      {Stage::Extract, "initial threshold, isovalue schedule and region growing"},
      {Stage::Split, "top-down splitting into the vortex tree"},
      {Stage::Profile, "meshes, skeletons and profiles of the leaves"},
      {Stage::Hairpin, "hairpin candidate filter"},
      {Stage::Cluster, "t-SNE + DBSCAN over the leaf profiles"},
      {Stage::Export, "write the bundle from the stage caches"}};
  for (const auto& [stage, help] : stages) {
    CLI::App* cmd = app.add_subcommand(stage_name(stage), help);
    cmd->add_option("--work", work, "stage cache directory")->capture_default_str();
    if (stage == Stage::Fields) cmd->add_option("--descriptor", descriptor, "dataset descriptor JSON")->required();
    if (stage == Stage::Export) cmd->add_option("--out", out, "bundle directory")->required();
    overrides.add_to(cmd);
    stage_cmds.emplace_back(cmd, stage);
  }

  CLI::App* all = app.add_subcommand("all", "run every stage and write the bundle");
  all->add_option("--descriptor", descriptor, "dataset descriptor JSON")->required();
  all->add_option("--out", out, "bundle directory")->required();
  overrides.add_to(all);

  std::string bind = "127.0.0.1:8080";
  fs::path bundle_dir;
  std::ptrdiff_t workers = 2;
  CLI::App* serve_cmd = app.add_subcommand("serve", "serve a bundle over HTTP");
  serve_cmd->add_option("--bundle", bundle_dir, "bundle directory")->required();
  serve_cmd->add_option("--bind", bind, "host:port")->capture_default_str();
  serve_cmd->add_option("--cluster-workers", workers, "concurrent cluster jobs")->capture_default_str();

  std::string scenario = "hairpin";
  std::size_t synth_n = 96;
  std::string precision = "float32";
  CLI::App* synth = app.add_subcommand("synth", "write a synthetic demo dataset and its descriptor");
  synth->add_option("--scenario", scenario, "hairpin|three-tubes")->check(CLI::IsMember({"hairpin", "three-tubes"}));
  synth->add_option("--size", synth_n, "grid vertices per axis")->capture_default_str();
  synth->add_option("--precision", precision, "float32|float64")->check(CLI::IsMember({"float32", "float64"}));
  synth->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    for (const auto& [cmd, stage] : stage_cmds)
      if (cmd->parsed()) return run_stage_command(stage, descriptor, work, out, overrides);

    if (all->parsed()) {
      PipelineParams params;
      overrides.apply(params);
      run_pipeline(DatasetDescriptor::load(descriptor), params, out);
      return kExitOk;
    }
    if (serve_cmd->parsed()) {
      serve(bundle_dir, bind, ServiceOptions{workers});
      return kExitOk;
    }
    if (synth->parsed()) {
      if (synth_n < 8) throw ValidationError("--size must be >= 8");
      const auto sc = scenario == "hairpin" ? synthetic::hairpin_scenario(synth_n)
                                            : synthetic::three_tubes_scenario(synth_n);
      DatasetDescriptor d;
      d.path = out / "velocity.raw";
      d.meta = sc.meta;
      d.precision = precision == "float32" ? Precision::Float32 : Precision::Float64;
      write_field(d, sc.velocity);
      nlohmann::json j = d.to_json();
      j["path"] = "velocity.raw";
      write_file(out / "descriptor.json", dump_json(j));
      std::cout << (out / "descriptor.json").string() << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return exit_code_for(e);
  }
  return kExitInternal;
}
