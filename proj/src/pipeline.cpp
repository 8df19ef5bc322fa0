#include "vortex/pipeline.hpp"

#include <chrono>
#include <cstring>
#include <fstream>

#include <spdlog/spdlog.h>

#include "parallel.hpp"
#include "vortex/errors.hpp"

namespace vortex {

namespace fs = std::filesystem;
using nlohmann::json;

void PipelineParams::set_bins(std::size_t n) {
  if (n < 10) throw ValidationError("bins must be >= 10");
  refine.n_bins = n;
  refine.pick_bin = n * 9 / 10 - 1;
  expand.n0 = n;
}

void PipelineParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
  };
  require(refine.n_bins >= 2 && refine.pick_bin < refine.n_bins, "threshold bin must lie inside the histogram");
  require(refine.cutoff_frac >= 0.0 && refine.cutoff_frac < 1.0, "cutoff fraction must be in [0, 1)");
  require(refine.last_bin_frac > 0.0 && refine.last_bin_frac <= 1.0, "last-bin fraction must be in (0, 1]");
  require(refine.diff_pct >= 0.0, "bin difference must be >= 0");
  require(refine.max_iterations >= 1, "iteration cap must be >= 1");
  require(expand.n0 >= 1 && expand.stop_frac > 0.0 && expand.stop_frac <= 1.0, "bad expansion parameters");
  require(noise_frac >= 0.0 && noise_frac < 1.0, "noise fraction must be in [0, 1)");
  require(split.vsf > 0.0, "vsf must be > 0");
  require(split.min_comp_frac >= 0.0 && split.min_comp_frac < 1.0, "component fraction must be in [0, 1)");
  require(simplify_min_nb1 >= 0 && simplify_min_nb1 <= 26 && simplify_min_nb2 >= 0 && simplify_min_nb2 <= 26,
          "simplification neighbour counts must be in [0, 26]");
  require(smooth_iterations >= 0, "smoothing iterations must be >= 0");
  require(smooth_factor >= 0.0 && smooth_factor <= 1.0, "smoothing factor must be in [0, 1]");
  require(skeleton.decimate_tolerance_cells >= 0.0, "decimation tolerance must be >= 0");
  require(hairpin.t1 > 0.0 && hairpin.t1 <= 1.0, "t1 must be in (0, 1]");
  require(hairpin.min_len_frac >= 0.0, "length fraction must be >= 0");
  if (cluster) {
    require(cluster->attributes.size() >= 2, "at least 2 cluster attributes required");
    for (const auto& a : cluster->attributes)
      if (!feature_index(a)) throw ValidationError("unknown attribute '" + a + "'");
    require(cluster->perplexity > 0.0, "perplexity must be > 0");
    require(!cluster->eps || *cluster->eps > 0.0, "eps must be > 0");
    require(cluster->min_pts >= 1, "min_pts must be >= 1");
  }
}

json PipelineParams::to_json() const {
  return json{
      {"histogram",
       {{"bins", refine.n_bins},
        {"cutoff_frac", refine.cutoff_frac},
        {"last_bin_frac", refine.last_bin_frac},
        {"diff_pct", refine.diff_pct},
        {"max_iterations", refine.max_iterations},
        {"pick_bin", refine.pick_bin},
        {"expansion_start_bins", expand.n0},
        {"expansion_stop_frac", expand.stop_frac},
        {"expansion_max_bins", expand.max_bins}}},
      {"noise_frac", noise_frac},
      {"vsf", split.vsf},
      {"min_comp_frac", split.min_comp_frac},
      {"simplify", {{"enabled", simplify}, {"min_nb1", simplify_min_nb1}, {"min_nb2", simplify_min_nb2}}},
      {"smoothing", {{"iterations", smooth_iterations}, {"factor", smooth_factor}}},
      {"skeleton",
       {{"decimate_tolerance_cells", skeleton.decimate_tolerance_cells}, {"extend_ends", skeleton.extend_ends}}},
      {"hairpin", {{"t1", hairpin.t1}, {"c_h_min", hairpin.c_h_min}, {"min_len_frac", hairpin.min_len_frac}}},
      {"cluster", cluster ? cluster_request_to_json(*cluster) : json(nullptr)}};
}

PipelineParams PipelineParams::from_json(const json& j) {
  PipelineParams p;
  try {
    const auto& h = j.at("histogram");
    p.refine.n_bins = h.at("bins").get<std::size_t>();
    p.refine.cutoff_frac = h.at("cutoff_frac").get<double>();
    p.refine.last_bin_frac = h.at("last_bin_frac").get<double>();
    p.refine.diff_pct = h.at("diff_pct").get<double>();
    p.refine.max_iterations = h.at("max_iterations").get<std::size_t>();
    p.refine.pick_bin = h.at("pick_bin").get<std::size_t>();
    p.expand.n0 = h.at("expansion_start_bins").get<std::size_t>();
    p.expand.stop_frac = h.at("expansion_stop_frac").get<double>();
    p.expand.max_bins = h.at("expansion_max_bins").get<std::size_t>();
    p.noise_frac = j.at("noise_frac").get<double>();
    p.split.vsf = j.at("vsf").get<double>();
    p.split.min_comp_frac = j.at("min_comp_frac").get<double>();
    p.simplify = j.at("simplify").at("enabled").get<bool>();
    p.simplify_min_nb1 = j.at("simplify").at("min_nb1").get<int>();
    p.simplify_min_nb2 = j.at("simplify").at("min_nb2").get<int>();
    p.smooth_iterations = j.at("smoothing").at("iterations").get<int>();
    p.smooth_factor = j.at("smoothing").at("factor").get<double>();
    p.skeleton.decimate_tolerance_cells = j.at("skeleton").at("decimate_tolerance_cells").get<double>();
    p.skeleton.extend_ends = j.at("skeleton").at("extend_ends").get<bool>();
    p.hairpin.t1 = j.at("hairpin").at("t1").get<double>();
    p.hairpin.c_h_min = j.at("hairpin").at("c_h_min").get<double>();
    p.hairpin.min_len_frac = j.at("hairpin").at("min_len_frac").get<double>();
    if (!j.at("cluster").is_null()) p.cluster = cluster_request_from_json(j.at("cluster"));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("pipeline parameters: ") + e.what());
  }
  p.validate();
  return p;
}

namespace {

constexpr std::array<Stage, 7> kStages{Stage::Fields,  Stage::Extract, Stage::Split, Stage::Profile,
                                       Stage::Hairpin, Stage::Cluster, Stage::Export};

StopReason parse_stop_reason(const std::string& s) {
  for (auto r : {StopReason::LastBinSmall, StopReason::LastBinsClose, StopReason::LastBinUnchanged,
                 StopReason::IterationCap})
    if (s == to_string(r)) return r;
  throw ValidationError("unknown stop reason '" + s + "'");
}

// Cell grid geometry without values; enough for bounding boxes.
CellField cell_geometry(const GridMeta& meta) {
  CellField f;
  f.meta = meta;
  f.cdims = meta.cell_dims();
  return f;
}

template <typename T>
const T& need(const std::optional<T>& v, const char* what) {
  if (!v) throw Error(std::string("missing input: ") + what);
  return *v;
}

void stage_fields(PipelineState& st) {
  auto [meta, vel] = load_field(st.descriptor);
  st.digest = dataset_digest(st.descriptor);
  st.meta = meta;
  FieldSet fs = compute_criteria(meta, vel);
  fs.velocity.data.clear();
  fs.velocity.data.shrink_to_fit();
  st.fields = std::move(fs);
}

void stage_extract(PipelineState& st, const PipelineParams& params) {
  const FieldSet& fs = need(st.fields, "fields");
  ExtractResult ex;
  const RefineResult r = refine_histogram(fs.lambda2, params.refine);
  ex.lambda2_init = r.lambda2_init;
  ex.refine_iterations = r.iterations;
  ex.stop_reason = r.reason;
  spdlog::info("lambda2_init = {} after {} refinement iterations ({})", r.lambda2_init, r.iterations,
               to_string(r.reason));
  ex.steps = expand_histogram(fs.lambda2, r.lambda2_init, params.expand);
  const CellField cf = CellField::from_vertices(fs.meta, fs.lambda2);
  ex.regions = extract_all_regions(cf, ex.lambda2_init, params.noise_frac);
  if (ex.regions.empty()) throw NoVorticalValuesError("no vortex region survives the noise filter");
  spdlog::info("{} regions, {} isovalue steps", ex.regions.size(), ex.steps.values.size());
  st.extract = std::move(ex);
}

void stage_split(PipelineState& st, const PipelineParams& params) {
  const FieldSet& fs = need(st.fields, "fields");
  const ExtractResult& ex = need(st.extract, "extracted regions");
  const CellField cf = CellField::from_vertices(fs.meta, fs.lambda2);
  VortexTree tree = build_tree(cf, ex.regions, ex.steps.values, params.split);
  if (params.simplify) {
    const auto leaves = tree.leaves();
    detail::parallel_for(leaves.size(), [&](std::size_t i) {
      TreeNode& node = tree.nodes[static_cast<std::size_t>(leaves[i])];
      SimplifyResult res = simplify_region(cf, node.region, params.simplify_min_nb1, params.simplify_min_nb2);
      if (res.emptied) {
        spdlog::warn("simplification would empty leaf {}; kept unsimplified", node.id);
      } else {
        res.region.id = node.id;
        node.region = std::move(res.region);
      }
    });
  }
  spdlog::info("tree: {} nodes, {} leaves, depth {}", tree.nodes.size(), tree.leaves().size(), tree.depth());
  st.tree = std::move(tree);
}

void stage_profile(PipelineState& st, const PipelineParams& params) {
  const FieldSet& fs = need(st.fields, "fields");
  const VortexTree& tree = need(st.tree, "vortex tree");
  const CellField cf = CellField::from_vertices(fs.meta, fs.lambda2);
  const auto leaves = tree.leaves();
  std::vector<VortexProfile> profiles(leaves.size());
  std::vector<SurfaceMesh> meshes(leaves.size());
  std::vector<Skeleton> skeletons(leaves.size());
  detail::parallel_for(leaves.size(), [&](std::size_t i) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(leaves[i])];
    VortexRegion region = node.region;
    region.id = node.id;
    meshes[i] = laplacian_smooth(extract_boundary_surface(cf, region), params.smooth_iterations, params.smooth_factor);
    skeletons[i] = skeletonize(cf, region, fs.omega_y_prime, params.skeleton);
    const GeometricFeatures g = geometric_features(skeletons[i].main_path_points(), fs.meta.axis_roles);
    const double c_h_tilde = adjusted_hairpin_curvature(g, hairpin_curvature(g));
    profiles[i] = build_profile(region, fs, g, c_h_tilde);
    profiles[i].id = node.id;
    profiles[i].parent_id = node.parent;
  });
  ProfileResult pr;
  pr.profiles = std::move(profiles);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    pr.meshes.emplace(leaves[i], std::move(meshes[i]));
    pr.skeletons.emplace(leaves[i], std::move(skeletons[i]));
  }
  st.profile = std::move(pr);
}

void stage_hairpin(PipelineState& st, const PipelineParams& params) {
  const ProfileResult& pr = need(st.profile, "profiles");
  std::vector<Skeleton> sks;
  sks.reserve(pr.profiles.size());
  for (const auto& p : pr.profiles) sks.push_back(pr.skeletons.at(p.id));
  st.hairpin = select_candidates(pr.profiles, sks, st.meta, params.hairpin);
  std::size_t n = 0;
  for (const auto& s : *st.hairpin) n += s.is_candidate ? 1 : 0;
  spdlog::info("{} hairpin candidates among {} leaves", n, pr.profiles.size());
}

void stage_cluster(PipelineState& st, const PipelineParams& params) {
  if (!params.cluster) {
    st.cluster.reset();
    return;
  }
  const ProfileResult& pr = need(st.profile, "profiles");
  const auto& scores = need(st.hairpin, "hairpin scores");
  std::vector<std::int64_t> candidates;
  for (const auto& s : scores)
    if (s.is_candidate) candidates.push_back(s.vortex_id);
  st.cluster = run_cluster_request(pr.profiles, *params.cluster, candidates);
  spdlog::info("{} clusters over {} vortices", st.cluster->cluster_count, st.cluster->ids.size());
}

}  // namespace

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::Fields: return "fields";
    case Stage::Extract: return "extract";
    case Stage::Split: return "split";
    case Stage::Profile: return "profile";
    case Stage::Hairpin: return "hairpin";
    case Stage::Cluster: return "cluster";
    case Stage::Export: return "export";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (auto s : kStages)
    if (name == stage_name(s)) return s;
  return std::nullopt;
}

void run_stage(Stage stage, PipelineState& state, const PipelineParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (stage) {
      case Stage::Fields: stage_fields(state); break;
      case Stage::Extract: stage_extract(state, params); break;
      case Stage::Split: stage_split(state, params); break;
      case Stage::Profile: stage_profile(state, params); break;
      case Stage::Hairpin: stage_hairpin(state, params); break;
      case Stage::Cluster: stage_cluster(state, params); break;
      case Stage::Export: break;
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage_name(stage), e.what(), exit_code_for(e));
  }
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  spdlog::info("stage {} finished in {:.3f} s", stage_name(stage), dt.count());
}

ExportBundle make_bundle(const PipelineState& st, const PipelineParams& params) {
  const ExtractResult& ex = need(st.extract, "extracted regions");
  const VortexTree& tree = need(st.tree, "vortex tree");
  const ProfileResult& pr = need(st.profile, "profiles");
  const auto& scores = need(st.hairpin, "hairpin scores");

  ExportBundle b;
  b.nodes = bundle_nodes(tree, pr.profiles);
  b.profiles = pr.profiles;
  b.hairpin = scores;
  b.meshes = pr.meshes;
  b.skeletons = pr.skeletons;
  if (params.cluster) {
    if (!st.cluster) throw Error("clustering requested but the cluster stage has not run");
    b.clusters = json{{"request", cluster_request_to_json(*params.cluster)},
                      {"result", cluster_result_to_json(*st.cluster)}};
  }

  std::size_t candidates = 0;
  for (const auto& s : scores) candidates += s.is_candidate ? 1 : 0;
  json dataset = grid_meta_to_json(st.meta);
  dataset["digest"] = st.digest;
  dataset["precision"] = st.descriptor.precision == Precision::Float32 ? "float32" : "float64";
  dataset["byte_order"] = st.descriptor.byte_order == ByteOrder::Little ? "little" : "big";
  dataset["component_order"] = st.descriptor.component_order;
  b.manifest = json{{"schema_version", kBundleSchemaVersion},
                    {"dataset", dataset},
                    {"parameters", params.to_json()},
                    {"lambda2_init", ex.lambda2_init},
                    {"refine", {{"iterations", ex.refine_iterations}, {"stop_reason", to_string(ex.stop_reason)}}},
                    {"lambda2_steps", ex.steps.values},
                    {"expansion_bins", ex.steps.final_bins},
                    {"counts",
                     {{"roots", tree.roots().size()},
                      {"nodes", tree.nodes.size()},
                      {"leaves", tree.leaves().size()},
                      {"depth", tree.depth()},
                      {"profiles", pr.profiles.size()},
                      {"hairpin_candidates", candidates}}}};
  return b;
}

ExportBundle run_pipeline(const DatasetDescriptor& descriptor, const PipelineParams& params, const fs::path& out_dir) {
  params.validate();
  PipelineState st;
  st.descriptor = descriptor;
  for (auto s : kStages) run_stage(s, st, params);
  const auto t0 = std::chrono::steady_clock::now();
  ExportBundle b;
  try {
    b = make_bundle(st, params);
    write_bundle(b, out_dir);
  } catch (const std::exception& e) {
    throw StageError("export", e.what(), exit_code_for(e));
  }
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  spdlog::info("bundle written to {} in {:.3f} s", out_dir.string(), dt.count());
  return b;
}

// ---- stage caches -------------------------------------------------------

namespace {

json read_json(const fs::path& p) {
  if (!fs::exists(p)) throw ValidationError("missing stage cache " + p.string() + " (run the earlier stage first)");
  try {
    return json::parse(read_file(p));
  } catch (const json::exception& e) {
    throw ValidationError(p.string() + ": " + e.what());
  }
}

std::vector<std::vector<double>*> scalar_arrays(FieldSet& f) {
  return {&f.lambda2, &f.q,           &f.delta, &f.lambda_ci, &f.divergence, &f.enstrophy,
          &f.omega_y_prime, &f.speed, &f.accel_mag, &f.jacobian_norm};
}

void save_fields(const PipelineState& st, const fs::path& work) {
  FieldSet& f = const_cast<FieldSet&>(need(st.fields, "fields"));
  std::string bytes;
  for (auto* a : scalar_arrays(f)) bytes.append(reinterpret_cast<const char*>(a->data()), a->size() * sizeof(double));
  bytes.append(reinterpret_cast<const char*>(f.vorticity.data()), f.vorticity.size() * sizeof(Vec3));
  write_file(work / "fields.bin", bytes);
  json header{{"descriptor", st.descriptor.to_json()},
              {"digest", st.digest},
              {"meta", grid_meta_to_json(st.meta)},
              {"vertex_count", st.meta.vertex_count()}};
  write_file(work / "fields.json", dump_json(header));
}

void load_fields_header(PipelineState& st, const fs::path& work) {
  const json h = read_json(work / "fields.json");
  st.descriptor = DatasetDescriptor::from_json(h.at("descriptor"));
  st.digest = h.at("digest").get<std::string>();
  st.meta = grid_meta_from_json(h.at("meta"));
}

void load_fields(PipelineState& st, const fs::path& work) {
  load_fields_header(st, work);
  const std::string bytes = read_file(work / "fields.bin");
  const std::size_t n = st.meta.vertex_count();
  FieldSet f;
  f.meta = st.meta;
  auto arrays = scalar_arrays(f);
  if (bytes.size() != (arrays.size() + 3) * n * sizeof(double)) throw ValidationError("fields cache has the wrong size");
  std::size_t off = 0;
  for (auto* a : arrays) {
    a->resize(n);
    std::memcpy(a->data(), bytes.data() + off, n * sizeof(double));
    off += n * sizeof(double);
  }
  f.vorticity.resize(n);
  std::memcpy(f.vorticity.data(), bytes.data() + off, n * sizeof(Vec3));
  st.fields = std::move(f);
}

json regions_json(std::span<const VortexRegion> regions) {
  json arr = json::array();
  for (const auto& r : regions) arr.push_back({{"id", r.id}, {"cells", r.cells}});
  return arr;
}

}  // namespace

void save_stage_cache(Stage stage, const PipelineState& st, const fs::path& work) {
  fs::create_directories(work);
  switch (stage) {
    case Stage::Fields: save_fields(st, work); break;
    case Stage::Extract: {
      const ExtractResult& ex = need(st.extract, "extracted regions");
      json j{{"lambda2_init", ex.lambda2_init},
             {"refine_iterations", ex.refine_iterations},
             {"stop_reason", to_string(ex.stop_reason)},
             {"steps", ex.steps.values},
             {"final_bins", ex.steps.final_bins},
             {"picked_indices", ex.steps.picked_indices},
             {"regions", regions_json(ex.regions)}};
      write_file(work / "extract.json", j.dump());
      break;
    }
    case Stage::Split: {
      const VortexTree& tree = need(st.tree, "vortex tree");
      json nodes = json::array();
      for (const auto& n : tree.nodes)
        nodes.push_back({{"id", n.id},
                         {"parent", n.parent ? json(*n.parent) : json(nullptr)},
                         {"children", n.children},
                         {"level", n.level},
                         {"split_iso", n.split_iso ? json(*n.split_iso) : json(nullptr)},
                         {"cells", n.region.cells}});
      write_file(work / "split.json", json{{"nodes", nodes}}.dump());
      break;
    }
    case Stage::Profile: {
      const ProfileResult& pr = need(st.profile, "profiles");
      fs::remove_all(work / "meshes");
      fs::remove_all(work / "skeletons");
      write_file(work / "profile.json", profiles_to_json(pr.profiles).dump());
      for (const auto& [id, m] : pr.meshes) write_file(work / "meshes" / (std::to_string(id) + ".mesh"), encode_mesh(m));
      for (const auto& [id, s] : pr.skeletons)
        write_file(work / "skeletons" / (std::to_string(id) + ".skel"), encode_skeleton(s));
      break;
    }
    case Stage::Hairpin:
      write_file(work / "hairpin.json", hairpin_to_json(need(st.hairpin, "hairpin scores")).dump());
      break;
    case Stage::Cluster:
      if (st.cluster) write_file(work / "cluster.json", cluster_result_to_json(*st.cluster).dump());
      else fs::remove(work / "cluster.json");
      break;
    case Stage::Export: break;
  }
}

void load_stage_cache(Stage stage, PipelineState& st, const fs::path& work) {
  try {
    switch (stage) {
      case Stage::Fields: load_fields(st, work); break;
      case Stage::Extract: {
        load_fields_header(st, work);
        const json j = read_json(work / "extract.json");
        ExtractResult ex;
        ex.lambda2_init = j.at("lambda2_init").get<double>();
        ex.refine_iterations = j.at("refine_iterations").get<std::size_t>();
        ex.stop_reason = parse_stop_reason(j.at("stop_reason").get<std::string>());
        ex.steps.values = j.at("steps").get<std::vector<double>>();
        ex.steps.final_bins = j.at("final_bins").get<std::size_t>();
        ex.steps.picked_indices = j.at("picked_indices").get<std::vector<std::size_t>>();
        const CellField geom = cell_geometry(st.meta);
        for (const auto& r : j.at("regions"))
          ex.regions.push_back(
              VortexRegion::from_cells(r.at("id").get<std::int64_t>(), r.at("cells").get<std::vector<CellId>>(), geom));
        st.extract = std::move(ex);
        break;
      }
      case Stage::Split: {
        load_fields_header(st, work);
        const json j = read_json(work / "split.json");
        const CellField geom = cell_geometry(st.meta);
        VortexTree tree;
        for (const auto& e : j.at("nodes")) {
          TreeNode n;
          n.id = e.at("id").get<std::int64_t>();
          if (!e.at("parent").is_null()) n.parent = e.at("parent").get<std::int64_t>();
          n.children = e.at("children").get<std::vector<std::int64_t>>();
          n.level = e.at("level").get<int>();
          if (!e.at("split_iso").is_null()) n.split_iso = e.at("split_iso").get<double>();
          n.region = VortexRegion::from_cells(n.id, e.at("cells").get<std::vector<CellId>>(), geom);
          tree.nodes.push_back(std::move(n));
        }
        st.tree = std::move(tree);
        break;
      }
      case Stage::Profile: {
        ProfileResult pr;
        pr.profiles = profiles_from_json(read_json(work / "profile.json"));
        for (const auto& p : pr.profiles) {
          const std::string name = std::to_string(p.id);
          pr.meshes.emplace(p.id, decode_mesh(read_file(work / "meshes" / (name + ".mesh"))));
          pr.skeletons.emplace(p.id, decode_skeleton(read_file(work / "skeletons" / (name + ".skel"))));
        }
        st.profile = std::move(pr);
        break;
      }
      case Stage::Hairpin: st.hairpin = hairpin_from_json(read_json(work / "hairpin.json")); break;
      case Stage::Cluster:
        if (fs::exists(work / "cluster.json")) st.cluster = cluster_result_from_json(read_json(work / "cluster.json"));
        break;
      case Stage::Export: break;
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("corrupt ") + stage_name(stage) + " cache: " + e.what());
  }
}

void load_prerequisites(Stage stage, PipelineState& st, const fs::path& work, const PipelineParams& params) {
  switch (stage) {
    case Stage::Fields: break;
    case Stage::Extract: load_stage_cache(Stage::Fields, st, work); break;
    case Stage::Split:
      load_stage_cache(Stage::Fields, st, work);
      load_stage_cache(Stage::Extract, st, work);
      break;
    case Stage::Profile:
      load_stage_cache(Stage::Fields, st, work);
      load_stage_cache(Stage::Split, st, work);
      break;
    case Stage::Hairpin:
      load_fields_header(st, work);
      load_stage_cache(Stage::Profile, st, work);
      break;
    case Stage::Cluster:
      load_stage_cache(Stage::Profile, st, work);
      load_stage_cache(Stage::Hairpin, st, work);
      break;
    case Stage::Export:
      load_stage_cache(Stage::Extract, st, work);
      load_stage_cache(Stage::Split, st, work);
      load_stage_cache(Stage::Profile, st, work);
      load_stage_cache(Stage::Hairpin, st, work);
      if (params.cluster) load_stage_cache(Stage::Cluster, st, work);
      break;
  }
}

}  // namespace vortex
