#pragma once
// Experiment harness behind the command-line tool: JSON configuration
// (fail-closed on unknown keys), run manifests that reproduce a run from a
// single file, CSV/PPM/JSON report bundles written atomically with rollback
// of partial output, and the five commands render / simulate / sweep /
// profile / bake.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "asdr/arch.hpp"
#include "asdr/camera.hpp"
#include "asdr/image.hpp"
#include "asdr/render.hpp"
#include "asdr/scene.hpp"
#include "asdr/trace.hpp"

namespace asdr {

inline constexpr char kToolVersion[] = "asdr 1.0.0";

struct ExperimentConfig {
  std::string scene = "spheres";
  uint64_t seed = 1;
  uint32_t width = 128;
  uint32_t height = 128;
  double fov_deg = 28.0;
  double camera_distance = 2.3;
  double t_near = 0.05;
  double t_far = 14.0;
  uint32_t ns = 64;             // full per-ray sample count
  uint32_t probe_stride = 5;    // d
  double threshold = 1.0 / 2048.0;  // delta
  uint32_t group_size = 1;      // n
  double early_eps = 0.0;       // eps
  uint32_t cache_entries = 8;   // register-cache capacity per level
  std::vector<std::string> features = {"adaptive", "approx", "hybrid",
                                       "cache"};
  std::string axis = "delta";   // sweep knob
  std::string out_dir = "out";
  uint32_t threads = 0;
  ArchConfig arch;

  bool feature(const std::string& name) const {
    for (const std::string& f : features)
      if (f == name) return true;
    return false;
  }

  void validate() const {
    scene_kind_from(scene);  // throws on unknown scenes
    if (width < 1 || height < 1)
      throw std::invalid_argument("config: image must be at least 1x1");
    if (ns < 1) throw std::invalid_argument("config: ns must be >= 1");
    if (probe_stride < 1)
      throw std::invalid_argument("config: probe stride must be >= 1");
    if (group_size < 1)
      throw std::invalid_argument("config: group size must be >= 1");
    if (early_eps < 0.0 || early_eps >= 1.0)
      throw std::invalid_argument("config: eps must lie in [0, 1)");
    if (!(fov_deg > 0.0) || fov_deg >= 180.0)
      throw std::invalid_argument("config: fov must lie in (0, 180)");
    if (!(camera_distance > 0.0))
      throw std::invalid_argument("config: camera distance must be > 0");
    if (!(t_near > 0.0) || !(t_far > t_near))
      throw std::invalid_argument("config: need 0 < near < far");
    if (axis != "delta" && axis != "n" && axis != "d" && axis != "cache")
      throw std::invalid_argument("config: axis must be delta, n, d or cache");
    for (const std::string& f : features)
      if (f != "adaptive" && f != "approx" && f != "hybrid" && f != "cache")
        throw std::invalid_argument("config: unknown feature '" + f + "'");
    if (out_dir.empty())
      throw std::invalid_argument("config: output directory required");
    arch.validate();
  }
};

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// --- JSON configuration -----------------------------------------------

namespace detail {

inline void reject_unknown(const nlohmann::json& doc,
                           const std::vector<std::string>& known,
                           const char* where) {
  for (const auto& [key, value] : doc.items()) {
    bool ok = false;
    for (const std::string& k : known) ok = ok || k == key;
    if (!ok)
      throw std::invalid_argument(std::string("config: unknown key '") + key +
                                  "' in " + where);
  }
}

inline void parse_energy(const nlohmann::json& doc, EnergyCosts& e) {
  reject_unknown(doc, {"xbar_read", "cache_hit", "mac", "fusion", "interp"},
                 "arch.energy");
  if (doc.contains("xbar_read")) e.xbar_read = doc["xbar_read"].get<double>();
  if (doc.contains("cache_hit")) e.cache_hit = doc["cache_hit"].get<double>();
  if (doc.contains("mac")) e.mac = doc["mac"].get<double>();
  if (doc.contains("fusion")) e.fusion = doc["fusion"].get<double>();
  if (doc.contains("interp")) e.interp = doc["interp"].get<double>();
}

inline void parse_arch(const nlohmann::json& doc, ArchConfig& a) {
  reject_unknown(
      doc,
      {"addr_lanes", "cache_entries", "xbar_rows", "xbar_cols", "table_size",
       "capacity", "max_copies", "fusion_throughput", "density_engines",
       "color_engines", "density_layers", "color_layers",
       "density_layer_latency", "color_layer_latency", "density_macs",
       "color_macs", "rays_per_cycle", "addr_buffer", "energy"},
      "arch");
  auto u32 = [&](const char* k, uint32_t& slot) {
    if (doc.contains(k)) slot = doc[k].get<uint32_t>();
  };
  auto u64 = [&](const char* k, uint64_t& slot) {
    if (doc.contains(k)) slot = doc[k].get<uint64_t>();
  };
  u32("addr_lanes", a.addr_lanes);
  u32("cache_entries", a.cache_entries);
  u32("xbar_rows", a.xbar_rows);
  u32("xbar_cols", a.xbar_cols);
  u64("table_size", a.table_size);
  u64("capacity", a.capacity);
  u32("max_copies", a.max_copies);
  u32("fusion_throughput", a.fusion_throughput);
  u32("density_engines", a.density_engines);
  u32("color_engines", a.color_engines);
  u32("density_layers", a.density_layers);
  u32("color_layers", a.color_layers);
  u32("density_layer_latency", a.density_layer_latency);
  u32("color_layer_latency", a.color_layer_latency);
  u64("density_macs", a.density_macs);
  u64("color_macs", a.color_macs);
  u32("rays_per_cycle", a.rays_per_cycle);
  u32("addr_buffer", a.addr_buffer);
  if (doc.contains("energy")) parse_energy(doc["energy"], a.energy);
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object())
    throw std::invalid_argument("config: document must be a JSON object");
  detail::reject_unknown(
      doc,
      {"scene", "seed", "width", "height", "fov_deg", "camera_distance",
       "t_near", "t_far", "ns", "probe_stride", "threshold", "group_size",
       "early_eps", "cache_entries", "features", "axis", "out_dir", "threads",
       "arch"},
      "the top level");

  ExperimentConfig cfg;
  auto str = [&](const char* k, std::string& slot) {
    if (doc.contains(k)) slot = doc[k].get<std::string>();
  };
  auto u32 = [&](const char* k, uint32_t& slot) {
    if (doc.contains(k)) slot = doc[k].get<uint32_t>();
  };
  auto f64 = [&](const char* k, double& slot) {
    if (doc.contains(k)) slot = doc[k].get<double>();
  };
  str("scene", cfg.scene);
  if (doc.contains("seed")) cfg.seed = doc["seed"].get<uint64_t>();
  u32("width", cfg.width);
  u32("height", cfg.height);
  f64("fov_deg", cfg.fov_deg);
  f64("camera_distance", cfg.camera_distance);
  f64("t_near", cfg.t_near);
  f64("t_far", cfg.t_far);
  u32("ns", cfg.ns);
  u32("probe_stride", cfg.probe_stride);
  f64("threshold", cfg.threshold);
  u32("group_size", cfg.group_size);
  f64("early_eps", cfg.early_eps);
  u32("cache_entries", cfg.cache_entries);
  if (doc.contains("features")) {
    cfg.features.clear();
    for (const auto& f : doc["features"])
      cfg.features.push_back(f.get<std::string>());
  }
  str("axis", cfg.axis);
  str("out_dir", cfg.out_dir);
  u32("threads", cfg.threads);
  if (doc.contains("arch")) detail::parse_arch(doc["arch"], cfg.arch);
  cfg.validate();
  return cfg;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json arch{
      {"addr_lanes", cfg.arch.addr_lanes},
      {"cache_entries", cfg.arch.cache_entries},
      {"xbar_rows", cfg.arch.xbar_rows},
      {"xbar_cols", cfg.arch.xbar_cols},
      {"table_size", cfg.arch.table_size},
      {"capacity", cfg.arch.capacity},
      {"max_copies", cfg.arch.max_copies},
      {"fusion_throughput", cfg.arch.fusion_throughput},
      {"density_engines", cfg.arch.density_engines},
      {"color_engines", cfg.arch.color_engines},
      {"density_layers", cfg.arch.density_layers},
      {"color_layers", cfg.arch.color_layers},
      {"density_layer_latency", cfg.arch.density_layer_latency},
      {"color_layer_latency", cfg.arch.color_layer_latency},
      {"density_macs", cfg.arch.density_macs},
      {"color_macs", cfg.arch.color_macs},
      {"rays_per_cycle", cfg.arch.rays_per_cycle},
      {"addr_buffer", cfg.arch.addr_buffer},
      {"energy",
       {{"xbar_read", cfg.arch.energy.xbar_read},
        {"cache_hit", cfg.arch.energy.cache_hit},
        {"mac", cfg.arch.energy.mac},
        {"fusion", cfg.arch.energy.fusion},
        {"interp", cfg.arch.energy.interp}}}};
  return nlohmann::json{{"scene", cfg.scene},
                        {"seed", cfg.seed},
                        {"width", cfg.width},
                        {"height", cfg.height},
                        {"fov_deg", cfg.fov_deg},
                        {"camera_distance", cfg.camera_distance},
                        {"t_near", cfg.t_near},
                        {"t_far", cfg.t_far},
                        {"ns", cfg.ns},
                        {"probe_stride", cfg.probe_stride},
                        {"threshold", cfg.threshold},
                        {"group_size", cfg.group_size},
                        {"early_eps", cfg.early_eps},
                        {"cache_entries", cfg.cache_entries},
                        {"features", cfg.features},
                        {"axis", cfg.axis},
                        {"out_dir", cfg.out_dir},
                        {"threads", cfg.threads},
                        {"arch", arch}};
}

// Accepts either a plain configuration document or a run manifest (the
// manifest nests the configuration under "config"), so a manifest alone
// reproduces its run.
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json doc = nlohmann::json::parse(is);
  if (doc.is_object() && doc.contains("config") && doc.contains("version")) {
    detail::reject_unknown(doc, {"command", "config", "version"},
                           "the manifest");
    return config_from_json(doc["config"]);
  }
  return config_from_json(doc);
}

// --- scene and camera -------------------------------------------------

inline Camera make_camera(const ExperimentConfig& cfg) {
  const Vec3 center{0.5, 0.5, 0.5};
  const double inv = cfg.camera_distance / std::sqrt(3.0);
  const Vec3 eye{center.x + inv, center.y + inv, center.z + inv};
  const double fov = cfg.fov_deg * 3.14159265358979323846 / 180.0;
  return look_at(eye, center, Vec3{0.0, 1.0, 0.0}, fov, cfg.width, cfg.height,
                 cfg.t_near, cfg.t_far);
}

inline RenderOptions render_options(const ExperimentConfig& cfg) {
  RenderOptions o;
  o.ns = cfg.ns;
  o.probe_stride = cfg.probe_stride;
  // Without the adaptive feature every pixel plans the full count.
  o.threshold = cfg.feature("adaptive") ? cfg.threshold : -1.0;
  o.group_size = cfg.feature("approx") ? cfg.group_size : 1;
  o.early_eps = cfg.early_eps;
  o.threads = cfg.threads;
  return o;
}

// --- output bundle plumbing -------------------------------------------

// Tracks files written for one command; anything noted but not committed
// is removed again, so failed runs leave no partial output behind.
class OutputSet {
 public:
  explicit OutputSet(const std::string& dir) : dir_(dir) {
    std::filesystem::create_directories(dir_);
  }

  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  std::string path(const std::string& name) const {
    return (std::filesystem::path(dir_) / name).string();
  }

  void note(const std::string& path) { written_.push_back(path); }

  void commit() { committed_ = true; }

  ~OutputSet() {
    if (committed_) return;
    for (const std::string& p : written_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  }

 private:
  std::string dir_;
  std::vector<std::string> written_;
  bool committed_ = false;
};

// Locale-independent CSV: comma separator, '.' decimal point, header row,
// LF line endings. NaN renders as an empty field.
class Csv {
 public:
  Csv& cell(const std::string& s) {
    if (!line_.empty()) line_.push_back(',');
    line_ += s;
    return *this;
  }
  Csv& cell(double v) {
    if (std::isnan(v)) return cell(std::string());
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return cell(std::string(buf));
  }
  Csv& cell(uint64_t v) { return cell(std::to_string(v)); }
  Csv& cell(uint32_t v) { return cell(std::to_string(v)); }
  Csv& endrow() {
    body_ += line_;
    body_.push_back('\n');
    line_.clear();
    return *this;
  }

  void write(const std::string& path) const {
    atomic_write(path, [&](std::ostream& os) { os << body_; });
  }

 private:
  std::string line_;
  std::string body_;
};

inline void write_manifest(const ExperimentConfig& cfg,
                           const std::string& command, OutputSet& out) {
  nlohmann::json doc{{"command", command},
                     {"config", config_to_json(cfg)},
                     {"version", kToolVersion}};
  const std::string path = out.path("manifest.json");
  atomic_write(path, [&](std::ostream& os) { os << doc.dump(2) << "\n"; });
  out.note(path);
}

// --- commands ----------------------------------------------------------

// Renders the scene twice (fixed full sampling and the configured pipeline)
// and reports image fidelity plus work counters.
inline void cmd_render(const ExperimentConfig& cfg) {
  cfg.validate();
  const SceneModel scene = make_scene(cfg.scene, cfg.seed);
  const Camera cam = make_camera(cfg);
  const RenderOptions opts = render_options(cfg);

  RenderOptions base_opts = opts;
  base_opts.group_size = 1;
  base_opts.early_eps = 0.0;
  const RenderReport base = render_baseline(scene, cam, cfg.ns, base_opts);
  const RenderReport run = render_asdr(scene, cam, opts);

  double executed = 0;
  for (uint32_t c : run.sample_counts) executed += c;
  executed /= double(run.sample_counts.size());
  uint64_t background = 0;
  for (double op : base.opacity) background += op < 1e-3 ? 1 : 0;

  OutputSet out(cfg.out_dir);
  write_ppm(out.path("baseline.ppm"), base.image);
  out.note(out.path("baseline.ppm"));
  write_ppm(out.path("asdr.ppm"), run.image);
  out.note(out.path("asdr.ppm"));

  Csv csv;
  csv.cell(std::string("psnr"))
      .cell(std::string("ssim"))
      .cell(std::string("mean_planned"))
      .cell(std::string("mean_executed"))
      .cell(std::string("full_count"))
      .cell(std::string("points_marched"))
      .cell(std::string("density_invocations"))
      .cell(std::string("color_invocations"))
      .cell(std::string("background_fraction"))
      .endrow();
  csv.cell(psnr(run.image, base.image))
      .cell(ssim(run.image, base.image))
      .cell(run.plan.mean_count())
      .cell(executed)
      .cell(uint64_t(cfg.ns))
      .cell(run.points_marched)
      .cell(run.density_invocations)
      .cell(run.color_invocations)
      .cell(double(background) / double(base.opacity.size()))
      .endrow();
  csv.write(out.path("metrics.csv"));
  out.note(out.path("metrics.csv"));

  write_manifest(cfg, "render", out);
  out.commit();
}

// Feature ladder shared by cmd_simulate: each row re-runs the same traces
// with one more optimization enabled, baselined against the strawman.
inline std::vector<std::pair<std::string, SimStats>> simulate_ladder(
    const ExperimentConfig& cfg, const RenderReport& base,
    const RenderReport& run, uint32_t group) {
  ArchConfig arch = cfg.arch;
  arch.cache_entries = cfg.cache_entries;

  std::vector<std::pair<std::string, SimStats>> rows;
  SimFeatures f;
  f.hybrid = false;
  f.cache = false;
  f.approx_honored = true;
  rows.emplace_back("strawman", simulate(*base.trace, base, 1, arch, f));
  f.approx_honored = false;
  rows.emplace_back("adaptive", simulate(*run.trace, run, group, arch, f));
  f.approx_honored = true;
  rows.emplace_back("approx", simulate(*run.trace, run, group, arch, f));
  f.hybrid = true;
  rows.emplace_back("hybrid", simulate(*run.trace, run, group, arch, f));
  f.cache = true;
  rows.emplace_back("full", simulate(*run.trace, run, group, arch, f));
  return rows;
}

inline nlohmann::json stats_to_json(const SimStats& st) {
  return nlohmann::json{{"total_cycles", st.total_cycles},
                        {"points", st.points},
                        {"rays", st.rays},
                        {"batches", st.batches},
                        {"lookups", st.lookups},
                        {"cache_hits", st.cache_hits},
                        {"cache_misses", st.cache_misses},
                        {"level_hits", st.level_hits},
                        {"level_misses", st.level_misses},
                        {"xbar_reads", st.xbar_reads},
                        {"xbar_busy_cycles", st.xbar_busy_cycles},
                        {"conflict_cycles", st.conflict_cycles},
                        {"max_xbar_reads", st.max_xbar_reads},
                        {"addr_stall_cycles", st.addr_stall_cycles},
                        {"fusion_ops", st.fusion_ops},
                        {"density_invocations", st.density_invocations},
                        {"color_invocations", st.color_invocations},
                        {"interp_ops", st.interp_ops},
                        {"fusion_busy_cycles", st.fusion_busy_cycles},
                        {"density_engine_cycles", st.density_engine_cycles},
                        {"color_engine_cycles", st.color_engine_cycles},
                        {"render_busy_cycles", st.render_busy_cycles},
                        {"energy_xbar", st.energy_xbar},
                        {"energy_cache", st.energy_cache},
                        {"energy_mac", st.energy_mac},
                        {"energy_fusion", st.energy_fusion},
                        {"energy_interp", st.energy_interp},
                        {"energy_total", st.energy_total}};
}

// Replays fixed-sampling and configured traces through the accelerator
// model, one row per optimization step, plus a ratio table.
inline void cmd_simulate(const ExperimentConfig& cfg) {
  cfg.validate();
  const SceneModel scene = make_scene(cfg.scene, cfg.seed);
  const Camera cam = make_camera(cfg);
  RenderOptions opts = render_options(cfg);
  opts.emit_trace = true;

  RenderOptions base_opts = opts;
  base_opts.group_size = 1;
  base_opts.early_eps = 0.0;
  const RenderReport base = render_baseline(scene, cam, cfg.ns, base_opts);
  const RenderReport run = render_asdr(scene, cam, opts);

  const auto rows = simulate_ladder(cfg, base, run, opts.group_size);
  const auto table = compare(rows, 0);

  OutputSet out(cfg.out_dir);
  Csv csv;
  csv.cell(std::string("name"))
      .cell(std::string("cycles"))
      .cell(std::string("cycle_speedup"))
      .cell(std::string("energy"))
      .cell(std::string("energy_ratio"))
      .cell(std::string("batches"))
      .cell(std::string("encoding_cycles"))
      .cell(std::string("conflict_cycles"))
      .cell(std::string("cache_hits"))
      .cell(std::string("cache_misses"))
      .cell(std::string("xbar_reads"))
      .cell(std::string("points"))
      .cell(std::string("rays"))
      .cell(std::string("density_invocations"))
      .cell(std::string("color_invocations"))
      .cell(std::string("interp_ops"))
      .endrow();
  nlohmann::json full = nlohmann::json::array();
  for (size_t i = 0; i < rows.size(); ++i) {
    const SimStats& st = rows[i].second;
    csv.cell(rows[i].first)
        .cell(st.total_cycles)
        .cell(table[i].cycle_speedup)
        .cell(st.energy_total)
        .cell(table[i].energy_ratio)
        .cell(st.batches)
        .cell(st.xbar_busy_cycles)
        .cell(st.conflict_cycles)
        .cell(st.cache_hits)
        .cell(st.cache_misses)
        .cell(st.xbar_reads)
        .cell(st.points)
        .cell(st.rays)
        .cell(st.density_invocations)
        .cell(st.color_invocations)
        .cell(st.interp_ops)
        .endrow();
    nlohmann::json row = stats_to_json(st);
    row["name"] = rows[i].first;
    full.push_back(row);
  }
  csv.write(out.path("sim.csv"));
  out.note(out.path("sim.csv"));
  atomic_write(out.path("sim.json"),
               [&](std::ostream& os) { os << full.dump(2) << "\n"; });
  out.note(out.path("sim.json"));

  write_manifest(cfg, "simulate", out);
  out.commit();
}

inline std::vector<double> sweep_values(const std::string& axis) {
  if (axis == "delta")
    return {0.0, 1.0 / 8192.0, 1.0 / 2048.0, 1.0 / 512.0, 1.0 / 128.0};
  if (axis == "n") return {1, 2, 4, 8};
  if (axis == "d") return {1, 2, 4, 5, 8);
  if (axis == "cache") return {0, 2, 4, 8, 16};
  throw std::invalid_argument("sweep: axis must be delta, n, d or cache");
}

// One row per knob value: fidelity against the fixed baseline plus the
// full-feature accelerator cost of the resulting trace.
inline void cmd_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<double> values = sweep_values(cfg.axis);
  const SceneModel scene = make_scene(cfg.scene, cfg.seed);
  const Camera cam = make_camera(cfg);

  RenderOptions base_opts = render_options(cfg);
  base_opts.group_size = 1;
  base_opts.early_eps = 0.0;
  base_opts.emit_trace = false;
  const RenderReport base = render_baseline(scene, cam, cfg.ns, base_opts);

  Csv csv;
  csv.cell(std::string("axis"))
      .cell(std::string("value"))
      .cell(std::string("psnr"))
      .cell(std::string("mean_planned"))
      .cell(std::string("mean_executed"))
      .cell(std::string("color_invocations"))
      .cell(std::string("cycles"))
      .cell(std::string("energy"))
      .endrow();

  for (double v : values) {
    ExperimentConfig row_cfg = cfg;
    if (cfg.axis == "delta") row_cfg.threshold = v;
    if (cfg.axis == "n") row_cfg.group_size = uint32_t(v);
    if (cfg.axis == "d") row_cfg.probe_stride = uint32_t(v);
    if (cfg.axis == "cache") row_cfg.cache_entries = uint32_t(v);

    RenderOptions opts = render_options(row_cfg);
    opts.emit_trace = true;
    const RenderReport run = render_asdr(scene, cam, opts);

    ArchConfig arch = row_cfg.arch;
    arch.cache_entries = row_cfg.cache_entries;
    SimFeatures f;  // all optimizations on
    const SimStats st =
        simulate(*run.trace, run, opts.group_size, arch, f);

    double executed = 0;
    for (uint32_t c : run.sample_counts) executed += c;
    executed /= double(run.sample_counts.size());

    csv.cell(cfg.axis)
        .cell(v)
        .cell(psnr(run.image, base.image))
        .cell(run.plan.mean_count())
        .cell(executed)
        .cell(run.color_invocations)
        .cell(st.total_cycles)
        .cell(st.energy_total)
        .endrow();
  }

  OutputSet out(cfg.out_dir);
  csv.write(out.path("sweep.csv"));
  out.note(out.path("sweep.csv"));
  write_manifest(cfg, "sweep", out);
  out.commit();
}

// Voxel-reuse statistics of the fixed-sampling trace, one row per level.
// The inter-ray rate is undefined (empty field) when no ray has a left
// neighbor, e.g. on a single-pixel image.
inline void cmd_profile(const ExperimentConfig& cfg) {
  cfg.validate();
  const SceneModel scene = make_scene(cfg.scene, cfg.seed);
  const Camera cam = make_camera(cfg);
  RenderOptions opts = render_options(cfg);
  opts.emit_trace = true;
  opts.group_size = 1;
  opts.early_eps = 0.0;
  const RenderReport base = render_baseline(scene, cam, cfg.ns, opts);

  const LocalityProfile pr = profile_locality(*base.trace, cfg.width);

  Csv csv;
  csv.cell(std::string("level"))
      .cell(std::string("resolution"))
      .cell(std::string("inter_ray_rate"))
      .cell(std::string("intra_max"))
      .cell(std::string("intra_mean"))
      .endrow();
  for (size_t l = 0; l < base.trace->level_res.size(); ++l) {
    csv.cell(uint64_t(l))
        .cell(uint64_t(base.trace->level_res[l]))
        .cell(pr.inter_rate[l])
        .cell(uint64_t(pr.intra_max[l]))
        .cell(pr.intra_mean[l])
        .endrow();
  }

  OutputSet out(cfg.out_dir);
  csv.write(out.path("profile.csv"));
  out.note(out.path("profile.csv"));
  write_manifest(cfg, "profile", out);
  out.commit();
}

// Bakes the analytic scene into embedding tables plus passthrough heads and
// serializes all three artifacts. Uses a compact all-dense schedule so the
// bake is exact up to trilinear interpolation.
inline void cmd_bake(const ExperimentConfig& cfg) {
  cfg.validate();
  const SceneModel analytic = make_scene(cfg.scene, cfg.seed);

  GridConfig grid;
  grid.levels = 3;
  grid.res_min = 16;
  grid.res_max = 63;
  grid.table_size = uint64_t(1) << 18;
  grid.seed = cfg.seed;
  const SceneModel baked = bake_scene(analytic, grid);

  OutputSet out(cfg.out_dir);
  dump_tables(*baked.tables, out.path("scene.grid"));
  out.note(out.path("scene.grid"));
  dump_mlp(baked.heads->density, out.path("density.mlp"));
  out.note(out.path("density.mlp"));
  dump_mlp(baked.heads->color, out.path("color.mlp"));
  out.note(out.path("color.mlp"));
  write_manifest(cfg, "bake", out);
  out.commit();
}

}  // namespace asdr
