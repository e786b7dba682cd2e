#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "asdr/camera.hpp"
#include "asdr/grid.hpp"
#include "asdr/image.hpp"
#include "asdr/mlp.hpp"
#include "asdr/scene.hpp"
#include "asdr/trace.hpp"
#include "asdr/volume.hpp"

namespace asdr {

struct RenderOptions {
  uint32_t ns = 64;              // full per-ray sample count
  uint32_t probe_stride = 5;     // d: probe every d-th pixel per axis
  double threshold = 1.0 / 2048.0;  // difficulty threshold for count choice
  uint32_t group_size = 1;       // n: one color evaluation per n samples
  double early_eps = 0.0;        // transmittance floor; 0 disables
  bool emit_trace = false;
  GridConfig trace_grid{};       // level schedule traced for analytic scenes
  uint32_t threads = 0;          // 0 = hardware; ASDR_THREADS caps either way
};

struct RenderReport {
  ImageBuffer image;
  PixelPlan plan;                       // planner output (advisory counts)
  std::vector<uint32_t> sample_counts;  // executed counts per pixel
  std::vector<double> opacity;          // 1 - residual transmittance
  uint64_t points_marched = 0;
  uint64_t density_invocations = 0;
  uint64_t color_invocations = 0;
  std::shared_ptr<AccessTrace> trace;   // set when tracing was requested
  double wall_ms = 0.0;  // informational only; never serialized
};

inline uint32_t resolve_threads(uint32_t requested) {
  uint32_t n = requested ? requested : std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("ASDR_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0 && uint32_t(cap) < n) n = uint32_t(cap);
  }
  return n;
}

namespace detail {

// Runs fn(i) for i in [0, count) across workers; every index is processed
// exactly once and writes only to its own slots, so the schedule never
// affects results.
template <class Fn>
inline void parallel_for(uint32_t count, uint32_t threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (uint32_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<uint32_t> next{0};
  auto worker = [&] {
    for (;;) {
      const uint32_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const uint32_t n = std::min(threads, count);
  pool.reserve(n);
  for (uint32_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
}

struct PixelRender {
  Vec3 color{};
  double residual = 1.0;
  uint32_t count = 0;
  std::vector<PointSample> samples;    // retained only when asked
  std::vector<uint16_t> trace_chunk;   // count * levels * 3 voxel bases
};

// Textbook per-pixel pipeline: march `count` samples, evaluate density for
// every sample, evaluate color at every group anchor, interpolate the rest,
// then composite (optionally truncating on the transmittance floor).
inline PixelRender render_pixel(const SceneModel& scene, const Ray& ray,
                                double t_near, double t_far, uint32_t count,
                                uint32_t group, double eps,
                                const std::vector<uint32_t>& trace_res,
                                bool keep_samples) {
  PixelRender out;
  out.count = count;
  std::vector<PointSample> samples(count);
  const double step = (t_far - t_near) / double(count);

  const bool grid = scene.is_grid();
  const uint32_t feat_n =
      grid ? scene.tables->cfg.levels * scene.tables->cfg.features : 0;
  std::vector<double> feat(feat_n);
  std::vector<std::array<double, kGeoFeatures>> geo(grid ? count : 0);
  std::vector<Vec3> positions(count);

  if (!trace_res.empty())
    out.trace_chunk.reserve(size_t(count) * trace_res.size() * 3);

  for (uint32_t j = 0; j < count; ++j) {
    const double t = t_near + (double(j) + 0.5) * step;
    const Vec3 p = clamp_unit_cube(ray.origin + ray.dir * t);
    positions[j] = p;
    samples[j].t = t;
    samples[j].delta = step;
    if (grid) {
      encode_point_into(p, *scene.tables, feat.data());
      const DensityOut d =
          density_head(scene.heads->density, feat.data(), feat.size());
      samples[j].sigma = d.sigma;
      geo[j] = d.geo;
    } else {
      samples[j].sigma = scene.density(p);
    }
    for (uint32_t res : trace_res) {
      const VoxelQuery q = voxel_of(p, res);
      out.trace_chunk.push_back(uint16_t(q.base[0]));
      out.trace_chunk.push_back(uint16_t(q.base[1]));
      out.trace_chunk.push_back(uint16_t(q.base[2]));
    }
  }

  const std::vector<uint32_t> anchors = group_anchors(count, group);
  if (grid) {
    const std::array<double, 16> sh = sh_encoding(ray.dir);
    for (uint32_t a : anchors)
      samples[a].color =
          color_head(scene.heads->color, geo[a].data(), sh.data());
  } else {
    for (uint32_t a : anchors) samples[a].color = scene.color_at(positions[a]);
  }
  interpolate_colors(samples, anchors);

  const RayComposite rc = composite_early(samples, eps);
  out.color = rc.color;
  out.residual = rc.residual;
  if (keep_samples) out.samples = std::move(samples);
  return out;
}

inline std::vector<uint32_t> trace_resolutions(const SceneModel& scene,
                                               const RenderOptions& opts) {
  if (!opts.emit_trace) return {};
  std::vector<uint32_t> res;
  if (scene.is_grid()) {
    for (const LevelSpec& s : scene.tables->levels)
      res.push_back(s.resolution);
  } else {
    for (const LevelSpec& s : build_levels(opts.trace_grid))
      res.push_back(s.resolution);
  }
  return res;
}

inline void assemble_report(RenderReport& rep,
                            std::vector<PixelRender>& pixels,
                            const Camera& cam,
                            const std::vector<uint32_t>& trace_res) {
  const size_t n = pixels.size();
  rep.sample_counts.resize(n);
  rep.opacity.resize(n);
  if (!trace_res.empty()) {
    rep.trace = std::make_shared<AccessTrace>();
    rep.trace->level_res = trace_res;
  }
  for (size_t i = 0; i < n; ++i) {
    PixelRender& px = pixels[i];
    rep.image.set(uint32_t(i % cam.width), uint32_t(i / cam.width), px.color);
    rep.sample_counts[i] = px.count;
    rep.opacity[i] = 1.0 - px.residual;
    rep.points_marched += px.count;
    if (rep.trace) {
      const size_t stride = trace_res.size() * 3;
      for (uint32_t j = 0; j * stride < px.trace_chunk.size(); ++j)
        rep.trace->append_point(uint32_t(i), j, &px.trace_chunk[j * stride]);
    }
    px.trace_chunk.clear();
    px.trace_chunk.shrink_to_fit();
  }
}

}  // namespace detail

// Fixed sampling: every pixel marches exactly ns points, one color per point,
// no early termination.
inline RenderReport render_baseline(const SceneModel& scene, const Camera& cam,
                                    uint32_t ns, RenderOptions opts = {}) {
  opts.ns = ns;
  const std::vector<Ray> rays = generate_rays(cam);
  const std::vector<uint32_t> trace_res = detail::trace_resolutions(scene, opts);
  const uint32_t threads = resolve_threads(opts.threads);

  RenderReport rep;
  rep.image = ImageBuffer(cam.width, cam.height);
  std::vector<detail::PixelRender> pixels(rays.size());
  detail::parallel_for(uint32_t(rays.size()), threads, [&](uint32_t i) {
    pixels[i] = detail::render_pixel(scene, rays[i], cam.t_near, cam.t_far, ns,
                                     1, 0.0, trace_res, false);
  });
  detail::assemble_report(rep, pixels, cam, trace_res);
  rep.density_invocations = rep.points_marched;
  rep.color_invocations = rep.points_marched;

  rep.plan.width = cam.width;
  rep.plan.height = cam.height;
  rep.plan.probe_stride = 1;
  rep.plan.full_count = ns;
  rep.plan.threshold = 0.0;
  rep.plan.counts.assign(rays.size(), ns);
  return rep;
}

// Two-phase adaptive render. Phase I renders every probe pixel at the full
// count, measures per-candidate difficulty, and plans per-pixel counts.
// Phase II renders the remaining pixels at their planned counts; probe
// pixels keep their Phase I colors (already full quality), so their executed
// count is ns regardless of the plan.
inline RenderReport render_asdr(const SceneModel& scene, const Camera& cam,
                                const RenderOptions& opts) {
  const std::vector<Ray> rays = generate_rays(cam);
  const std::vector<uint32_t> trace_res = detail::trace_resolutions(scene, opts);
  const uint32_t threads = resolve_threads(opts.threads);
  const uint32_t d = std::max(1u, opts.probe_stride);
  const uint32_t gw = (cam.width - 1) / d + 1;
  const uint32_t gh = (cam.height - 1) / d + 1;
  const std::vector<uint32_t> cands = candidate_counts(opts.ns);

  std::vector<detail::PixelRender> pixels(rays.size());
  std::vector<uint32_t> probe_choice(size_t(gw) * gh);

  // Phase I: full-count probes plus difficulty-driven count selection.
  detail::parallel_for(uint32_t(probe_choice.size()), threads, [&](uint32_t g) {
    const uint32_t px = (g % gw) * d, py = (g / gw) * d;
    const size_t pix = size_t(py) * cam.width + px;
    detail::PixelRender pr =
        detail::render_pixel(scene, rays[pix], cam.t_near, cam.t_far, opts.ns,
                             opts.group_size, 0.0, trace_res, true);
    const RayComposite full = composite(pr.samples);
    std::vector<double> rds(cands.size());
    for (size_t c = 0; c < cands.size(); ++c)
      rds[c] = difficulty(full, composite(subsample(pr.samples, cands[c])));
    probe_choice[g] = choose_count(rds, cands, opts.ns, opts.threshold);
    pr.samples.clear();
    pr.samples.shrink_to_fit();
    pixels[pix] = std::move(pr);
  });

  RenderReport rep;
  rep.image = ImageBuffer(cam.width, cam.height);
  rep.plan = plan_from_probe(probe_choice, gw, gh, d, cam.width, cam.height,
                             opts.ns, opts.threshold, cands.front());

  // Phase II: everything that is not a probe renders at its planned count.
  detail::parallel_for(uint32_t(rays.size()), threads, [&](uint32_t i) {
    const uint32_t x = i % cam.width, y = i / cam.width;
    if (x % d == 0 && y % d == 0) return;  // probe: Phase I result stands
    pixels[i] = detail::render_pixel(scene, rays[i], cam.t_near, cam.t_far,
                                     rep.plan.counts[i], opts.group_size,
                                     opts.early_eps, trace_res, false);
  });

  detail::assemble_report(rep, pixels, cam, trace_res);
  const uint32_t n = std::max(1u, opts.group_size);
  for (size_t i = 0; i < pixels.size(); ++i) {
    const uint32_t cnt = rep.sample_counts[i];
    rep.density_invocations += cnt;
    rep.color_invocations += (cnt + n - 1) / n;
  }
  return rep;
}

}  // namespace asdr
