#pragma once
// Deterministic cycle-level model of a compute-in-memory accelerator for
// multiresolution-grid neural rendering. Embedding tables live in crossbar
// arrays, one table entry per crossbar row. Levels whose padded vertex
// domain fits the per-level table are stored densely and replicated to fill
// the table; the rest fall back to hashed placement. A small per-level
// register cache short-circuits repeated vertex reads, and per-batch row
// arbitration charges the serialization that remains.
//
// Pipeline timeline, one global clock:
//   address generation (one batch of addr_lanes requests per cycle, bounded
//   by addr_buffer batches in flight) -> register cache -> crossbar reads
//   (misses only; arbitrate() cycles per batch, zero for all-hit batches)
//   -> feature fusion (fusion_throughput points per cycle) -> density MLP
//   engines -> color MLP engines (anchor samples only when the renderer's
//   color grouping is honored) -> compositing (rays_per_cycle).
// Stage handoffs cost one cycle each; identical inputs give identical stats.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "asdr/grid.hpp"
#include "asdr/render.hpp"
#include "asdr/trace.hpp"

namespace asdr {

struct EnergyCosts {
  double xbar_read = 1.0;   // one coalesced crossbar row activation
  double cache_hit = 0.05;  // register-file lookup serving a vertex
  double mac = 0.002;       // one multiply-accumulate in an MLP engine
  double fusion = 0.25;     // trilinear blend + concat for one point
  double interp = 0.1;      // one interpolated (skipped) color evaluation
};

struct ArchConfig {
  uint32_t addr_lanes = 64;    // vertex requests issued per cycle
  uint32_t cache_entries = 8;  // register-cache capacity per level (0 = off)
  uint32_t xbar_rows = 64;     // rows per crossbar; one table entry per row
  uint32_t xbar_cols = 64;     // row width in cells; informational
  uint64_t table_size = uint64_t(1) << 19;  // entries provisioned per level
  uint64_t capacity = uint64_t(16) << 19;   // total entries, all levels
  uint32_t max_copies = 0;  // cap on dense replication; 0 = fill the table
  uint32_t fusion_throughput = 32;  // points fused per cycle
  uint32_t density_engines = 4;
  uint32_t color_engines = 4;
  uint32_t density_layers = 2;
  uint32_t color_layers = 5;
  uint32_t density_layer_latency = 4;  // cycles per layer
  uint32_t color_layer_latency = 4;
  uint64_t density_macs = 5120;   // multiply-accumulates per density call
  uint64_t color_macs = 14464;    // multiply-accumulates per color call
  uint32_t rays_per_cycle = 8;    // compositing engine throughput
  uint32_t addr_buffer = 4;       // generated batches allowed in flight
  EnergyCosts energy;

  void validate() const {
    auto positive = [](uint64_t v, const char* what) {
      if (v == 0)
        throw std::invalid_argument(std::string("arch: ") + what +
                                    " must be >= 1");
    };
    positive(addr_lanes, "addr_lanes");
    positive(xbar_rows, "xbar_rows");
    positive(xbar_cols, "xbar_cols");
    positive(fusion_throughput, "fusion_throughput");
    positive(density_engines, "density_engines");
    positive(color_engines, "color_engines");
    positive(density_layers, "density_layers");
    positive(color_layers, "color_layers");
    positive(density_layer_latency, "density_layer_latency");
    positive(color_layer_latency, "color_layer_latency");
    positive(rays_per_cycle, "rays_per_cycle");
    positive(addr_buffer, "addr_buffer");
    if ((table_size & (table_size - 1)) != 0 || table_size == 0)
      throw std::invalid_argument("arch: table_size must be a power of two");
    if ((xbar_rows & (xbar_rows - 1)) != 0)
      throw std::invalid_argument("arch: xbar_rows must be a power of two");
    if (xbar_rows > table_size)
      throw std::invalid_argument("arch: xbar_rows exceeds the level table");
    if (capacity < table_size)
      throw std::invalid_argument("arch: capacity below one level table");
  }
};

inline uint32_t floor_log2(uint64_t v) {
  uint32_t b = 0;
  while ((v >> 1) != 0) {
    v >>= 1;
    ++b;
  }
  return b;
}

struct LevelLayout {
  uint32_t level = 0;
  uint32_t resolution = 0;  // N: cells per axis; vertices 0..N
  MappingMode mode = MappingMode::hashed;
  uint32_t axis_bits = 0;  // w: padded axis = 1 << w (dense only)
  uint32_t copies = 1;     // dense replicas; 1 when hashed
  uint64_t xbar_base = 0;  // first crossbar id of this level's slice
  uint64_t xbar_count = 0;
};

struct PhysicalLayout {
  std::vector<LevelLayout> levels;
  uint32_t xbar_rows = 0;
  uint64_t table_size = 0;
  GridConfig hash_cfg;  // hash constants for hashed levels
};

namespace detail {

inline PhysicalLayout plan_layout_impl(const std::vector<uint32_t>& level_res,
                                       const GridConfig& hash_cfg,
                                       const ArchConfig& arch, bool hybrid) {
  arch.validate();
  if (level_res.empty())
    throw std::invalid_argument("layout: at least one level required");
  const uint64_t table = hash_cfg.table_size;
  if ((table & (table - 1)) != 0 || table == 0)
    throw std::invalid_argument("layout: table size must be a power of two");
  if (arch.xbar_rows > table)
    throw std::invalid_argument("layout: crossbar rows exceed the table");
  if (level_res.size() > arch.capacity / table)
    throw std::invalid_argument("layout: level tables exceed total capacity");

  PhysicalLayout out;
  out.xbar_rows = arch.xbar_rows;
  out.table_size = table;
  out.hash_cfg = hash_cfg;
  const uint64_t xbars_per_level = table / arch.xbar_rows;
  for (size_t l = 0; l < level_res.size(); ++l) {
    LevelLayout lv;
    lv.level = uint32_t(l);
    lv.resolution = level_res[l];
    if (lv.resolution == 0)
      throw std::invalid_argument("layout: zero resolution level");
    lv.axis_bits = ceil_log2(uint64_t(lv.resolution) + 1);
    const bool fits = 3 * lv.axis_bits < 63 &&
                      (uint64_t(1) << (3 * lv.axis_bits)) <= table;
    if (hybrid && fits) {
      lv.mode = MappingMode::dense;
      // table and padded domain are both powers of two, so replication
      // fills the level's slice exactly.
      uint64_t copies = table >> (3 * lv.axis_bits);
      if (arch.max_copies)
        copies = std::min(copies, uint64_t(1) << floor_log2(arch.max_copies));
      lv.copies = uint32_t(copies);
    } else {
      lv.mode = MappingMode::hashed;
      lv.copies = 1;
    }
    lv.xbar_base = l * xbars_per_level;
    lv.xbar_count = xbars_per_level;
    out.levels.push_back(lv);
  }
  return out;
}

}  // namespace detail

inline PhysicalLayout plan_layout(const std::vector<uint32_t>& level_res,
                                  const ArchConfig& arch, bool hybrid = true) {
  GridConfig hash_cfg;
  hash_cfg.table_size = arch.table_size;
  return detail::plan_layout_impl(level_res, hash_cfg, arch, hybrid);
}

inline PhysicalLayout plan_layout(const GridConfig& grid,
                                  const ArchConfig& arch, bool hybrid = true) {
  grid.validate();
  std::vector<uint32_t> res;
  for (const LevelSpec& s : build_levels(grid)) res.push_back(s.resolution);
  return detail::plan_layout_impl(res, grid, arch, hybrid);
}

// Physical address of a vertex inside a dense level's slice. Bit fields,
// most significant first: [copy | x0 y0 z0 | x>>1 | y>>1 | z>>1]. The
// parity field guarantees the eight corners of any voxel differ in the
// bits above row granularity, so they land on eight distinct crossbars.
inline uint64_t dehash_address(uint32_t x, uint32_t y, uint32_t z,
                               const LevelLayout& lv, uint32_t copy) {
  if (lv.mode != MappingMode::dense)
    throw std::invalid_argument("dehash: level is not dense-mapped");
  const uint32_t w = lv.axis_bits;
  const uint32_t axis = uint32_t(1) << w;
  if (x >= axis || y >= axis || z >= axis)
    throw std::out_of_range("dehash: vertex outside the padded domain");
  if (copy >= lv.copies) throw std::out_of_range("dehash: replica id");
  uint64_t a = copy;
  a = (a << 3) | (uint64_t(x & 1) << 2) | (uint64_t(y & 1) << 1) |
      uint64_t(z & 1);
  a = (a << (w - 1)) | (x >> 1);
  a = (a << (w - 1)) | (y >> 1);
  a = (a << (w - 1)) | (z >> 1);
  return a;
}

// Issue lanes spread replicated reads round-robin across copies.
inline uint32_t assign_copy(uint32_t lane, const LevelLayout& lv) {
  return lane % lv.copies;
}

inline uint64_t crossbar_of(uint64_t level_local_addr, const LevelLayout& lv,
                            uint32_t xbar_rows) {
  return lv.xbar_base + level_local_addr / xbar_rows;
}

// Fraction of provisioned entries holding live vertex data. Dense levels
// count every replica of their (N+1)^3 vertices; hashed levels count one
// entry per vertex up to the table size.
inline double storage_utilization(const PhysicalLayout& lo) {
  long double useful = 0, allocated = 0;
  for (const LevelLayout& lv : lo.levels) {
    const long double verts =
        powl((long double)(lv.resolution) + 1.0L, 3.0L);
    if (lv.mode == MappingMode::dense)
      useful += (long double)(lv.copies)*verts;
    else
      useful += std::min<long double>((long double)(lo.table_size), verts);
    allocated += (long double)(lo.table_size);
  }
  return double(useful / allocated);
}

// Fully associative LRU over vertex keys. Capacities are a handful of
// entries, so a linear scan is both simplest and fastest.
class RegisterCache {
 public:
  explicit RegisterCache(uint32_t capacity) : cap_(capacity) {
    slots_.reserve(capacity);
  }

  // true = hit (refreshes recency); miss inserts, evicting least recent.
  bool access(uint64_t key) {
    ++tick_;
    for (Slot& s : slots_)
      if (s.key == key) {
        s.stamp = tick_;
        return true;
      }
    if (cap_ == 0) return false;
    if (slots_.size() < cap_) {
      slots_.push_back({key, tick_});
      return false;
    }
    Slot* lru = &slots_[0];
    for (Slot& s : slots_)
      if (s.stamp < lru->stamp) lru = &s;
    *lru = {key, tick_};
    return false;
  }

 private:
  struct Slot {
    uint64_t key;
    uint64_t stamp;
  };
  uint32_t cap_;
  uint64_t tick_ = 0;
  std::vector<Slot> slots_;
};

struct ArbResult {
  uint64_t cycles = 0;  // slowest crossbar's distinct-row count
  uint64_t reads = 0;   // coalesced row activations across all crossbars
};

namespace detail {

// Sorts and dedupes (crossbar, row) pairs in place; same-row requests
// coalesce into one read, distinct rows on one crossbar serialize.
inline ArbResult arbitrate_inplace(
    std::vector<std::pair<uint64_t, uint64_t>>& reads) {
  ArbResult r;
  if (reads.empty()) return r;
  std::sort(reads.begin(), reads.end());
  reads.erase(std::unique(reads.begin(), reads.end()), reads.end());
  r.reads = reads.size();
  uint64_t run = 1, best = 1;
  for (size_t i = 1; i < reads.size(); ++i) {
    run = reads[i].first == reads[i - 1].first ? run + 1 : 1;
    best = std::max(best, run);
  }
  r.cycles = best;
  return r;
}

}  // namespace detail

// Service latency of one batch of missing reads, as (crossbar, row) pairs.
inline ArbResult arbitrate(std::vector<std::pair<uint64_t, uint64_t>> reads) {
  return detail::arbitrate_inplace(reads);
}

struct SimFeatures {
  bool hybrid = true;         // dense replication for levels that fit
  bool cache = true;          // per-level register caches
  bool approx_honored = true; // color only anchor samples of each group
};

struct SimStats {
  uint64_t total_cycles = 0;

  uint64_t points = 0;
  uint64_t rays = 0;
  uint64_t batches = 0;  // address-generation busy cycles

  uint64_t lookups = 0;
  uint64_t cache_hits = 0;
  uint64_t cache_misses = 0;
  std::vector<uint64_t> level_hits;
  std::vector<uint64_t> level_misses;

  uint64_t xbar_reads = 0;        // coalesced row activations
  uint64_t xbar_busy_cycles = 0;  // crossbar service: sum of batch latencies
  uint64_t conflict_cycles = 0;   // serialization beyond one cycle per batch
  uint64_t max_xbar_reads = 0;    // busiest single crossbar, whole run
  uint64_t addr_stall_cycles = 0; // generation held by the in-flight cap

  uint64_t fusion_ops = 0;
  uint64_t density_invocations = 0;
  uint64_t color_invocations = 0;
  uint64_t interp_ops = 0;

  uint64_t fusion_busy_cycles = 0;
  uint64_t density_engine_cycles = 0;
  uint64_t color_engine_cycles = 0;
  uint64_t render_busy_cycles = 0;

  double energy_xbar = 0;
  double energy_cache = 0;
  double energy_mac = 0;
  double energy_fusion = 0;
  double energy_interp = 0;
  double energy_total = 0;
};

// Replays an access trace through the accelerator pipeline. group_size is
// the renderer's color grouping n; with approx_honored the color engines
// run only for anchor samples (in-ray index divisible by n) and the rest
// cost one interpolation op each.
inline SimStats simulate(const AccessTrace& trace, uint32_t group_size,
                         const ArchConfig& arch, const SimFeatures& feat = {}) {
  arch.validate();
  if (group_size == 0)
    throw std::invalid_argument("simulate: group size must be >= 1");
  const uint32_t L = trace.levels();
  const size_t n_points = trace.point_count();

  SimStats st;
  st.level_hits.assign(L, 0);
  st.level_misses.assign(L, 0);
  if (n_points == 0) return st;
  if (L == 0)
    throw std::invalid_argument("simulate: trace has points but no levels");

  const PhysicalLayout lo = plan_layout(trace.level_res, arch, feat.hybrid);
  std::vector<RegisterCache> caches(
      L, RegisterCache(feat.cache ? arch.cache_entries : 0));

  const uint32_t lanes = arch.addr_lanes;
  const uint64_t reqs_per_point = uint64_t(L) * 8;
  const uint64_t total_reqs = trace.request_count();
  const uint64_t n_batches = (total_reqs + lanes - 1) / lanes;

  // --- address generation, cache, crossbar service ---
  std::vector<uint64_t> point_ready(n_points, 0);
  std::vector<uint64_t> comp_ring(arch.addr_buffer, 0);
  std::vector<uint32_t> xbar_load(size_t(L) * (lo.table_size / lo.xbar_rows),
                                  0);
  std::vector<std::pair<uint64_t, uint64_t>> miss_reads;
  std::vector<size_t> miss_points;
  miss_reads.reserve(lanes);
  miss_points.reserve(lanes);

  uint64_t gen_prev = 0, xbar_free = 0;
  for (uint64_t b = 0; b < n_batches; ++b) {
    const uint64_t q0 = b * lanes;
    const uint64_t q1 = std::min(q0 + lanes, total_reqs);

    uint64_t gen = gen_prev + 1;
    if (b >= arch.addr_buffer)
      gen = std::max(gen, comp_ring[size_t(b % arch.addr_buffer)]);
    st.addr_stall_cycles += gen - (gen_prev + 1);
    gen_prev = gen;

    miss_reads.clear();
    miss_points.clear();
    for (uint64_t q = q0; q < q1; ++q) {
      const size_t p = size_t(q / reqs_per_point);
      const uint64_t r = q % reqs_per_point;
      const uint32_t level = uint32_t(r / 8);
      const uint32_t corner = uint32_t(r % 8);
      const uint16_t* base = trace.base(p, level);
      const uint32_t cx = uint32_t(base[0]) + (corner & 1);
      const uint32_t cy = uint32_t(base[1]) + ((corner >> 1) & 1);
      const uint32_t cz = uint32_t(base[2]) + (corner >> 2);
      const LevelLayout& lv = lo.levels[level];

      // Cache keys identify the vertex, not the replica serving it: every
      // replica holds the same value, so a cached vertex is a hit no
      // matter which lane would have read it.
      uint64_t key;
      if (lv.mode == MappingMode::dense) {
        const uint32_t w = lv.axis_bits;
        key = ((uint64_t(cx) << w | cy) << w) | cz;
      } else {
        key = hash_index(cx, cy, cz, lo.hash_cfg);
      }

      ++st.lookups;
      if (caches[level].access(key)) {
        ++st.cache_hits;
        ++st.level_hits[level];
        point_ready[p] = std::max(point_ready[p], gen);
      } else {
        ++st.cache_misses;
        ++st.level_misses[level];
        const uint64_t local =
            lv.mode == MappingMode::dense
                ? dehash_address(cx, cy, cz, lv,
                                 assign_copy(uint32_t(q % lanes), lv))
                : key;
        miss_reads.push_back(
            {crossbar_of(local, lv, lo.xbar_rows), local % lo.xbar_rows});
        miss_points.push_back(p);
      }
    }

    uint64_t comp = gen;  // all-hit batches bypass the crossbars entirely
    if (!miss_reads.empty()) {
      const ArbResult arb = detail::arbitrate_inplace(miss_reads);
      const uint64_t start = std::max(gen, xbar_free);
      comp = start + arb.cycles;
      xbar_free = comp;
      st.xbar_busy_cycles += arb.cycles;
      st.conflict_cycles += arb.cycles - 1;
      st.xbar_reads += arb.reads;
      for (const auto& [xb, row] : miss_reads) ++xbar_load[size_t(xb)];
      for (size_t p : miss_points)
        point_ready[p] = std::max(point_ready[p], comp);
    }
    comp_ring[size_t(b % arch.addr_buffer)] = comp;
  }
  st.batches = n_batches;
  for (uint32_t l : xbar_load)
    st.max_xbar_reads = std::max<uint64_t>(st.max_xbar_reads, l);

  // --- fusion, MLP engines, compositing ---
  auto issue = [](uint64_t ready, uint64_t& cycle, uint32_t& used,
                  uint32_t quota) {
    uint64_t c = std::max(ready + 1, cycle);
    if (c == cycle && used == quota) ++c;
    if (c > cycle) {
      cycle = c;
      used = 0;
    }
    ++used;
    return c;
  };

  const uint64_t density_lat =
      uint64_t(arch.density_layers) * arch.density_layer_latency;
  const uint64_t color_lat =
      uint64_t(arch.color_layers) * arch.color_layer_latency;
  std::vector<uint64_t> density_free(arch.density_engines, 0);
  std::vector<uint64_t> color_free(arch.color_engines, 0);

  uint64_t fu_cycle = 0, rd_cycle = 0;
  uint32_t fu_used = 0, rd_used = 0;
  uint64_t ray_last = 0, total = 0;

  auto flush_ray = [&]() {
    const uint64_t done =
        issue(ray_last, rd_cycle, rd_used, arch.rays_per_cycle);
    total = std::max(total, done);
    ++st.rays;
  };

  for (size_t p = 0; p < n_points; ++p) {
    const uint64_t fused =
        issue(point_ready[p], fu_cycle, fu_used, arch.fusion_throughput);
    ++st.fusion_ops;

    auto dmin = std::min_element(density_free.begin(), density_free.end());
    const uint64_t den = std::max(fused, *dmin) + density_lat;
    *dmin = den;
    ++st.density_invocations;

    uint64_t done = den;
    const bool anchor =
        !feat.approx_honored || trace.idx_in_ray[p] % group_size == 0;
    if (anchor) {
      auto cmin = std::min_element(color_free.begin(), color_free.end());
      done = std::max(den, *cmin) + color_lat;
      *cmin = done;
      ++st.color_invocations;
    } else {
      ++st.interp_ops;
    }

    if (p > 0 && trace.ray_of_point[p] != trace.ray_of_point[p - 1])
      flush_ray();
    ray_last = p > 0 && trace.ray_of_point[p] == trace.ray_of_point[p - 1]
                   ? std::max(ray_last, done)
                   : done;
  }
  flush_ray();

  st.points = n_points;
  st.total_cycles = total;
  st.fusion_busy_cycles = (st.points + arch.fusion_throughput - 1) /
                          arch.fusion_throughput;
  st.density_engine_cycles = st.density_invocations * density_lat;
  st.color_engine_cycles = st.color_invocations * color_lat;
  st.render_busy_cycles =
      (st.rays + arch.rays_per_cycle - 1) / arch.rays_per_cycle;

  const EnergyCosts& e = arch.energy;
  const uint64_t macs = st.density_invocations * arch.density_macs +
                        st.color_invocations * arch.color_macs;
  st.energy_xbar = double(st.xbar_reads) * e.xbar_read;
  st.energy_cache = double(st.cache_hits) * e.cache_hit;
  st.energy_mac = double(macs) * e.mac;
  st.energy_fusion = double(st.fusion_ops) * e.fusion;
  st.energy_interp = double(st.interp_ops) * e.interp;
  st.energy_total = st.energy_xbar + st.energy_cache + st.energy_mac +
                    st.energy_fusion + st.energy_interp;
  return st;
}

inline SimStats simulate(const AccessTrace& trace, const RenderReport& report,
                         uint32_t group_size, const ArchConfig& arch,
                         const SimFeatures& feat = {}) {
  if (trace.point_count() != report.points_marched)
    throw std::invalid_argument(
        "simulate: trace and report disagree on marched points");
  return simulate(trace, group_size, arch, feat);
}

struct LocalityProfile {
  std::vector<double> inter_rate;   // NaN when no ray has a left neighbor
  std::vector<uint32_t> intra_max;  // largest same-voxel run in any ray
  std::vector<double> intra_mean;   // mean over rays of that maximum
};

// Voxel reuse statistics per level. inter_rate is the fraction of a ray's
// points whose voxel was also touched by the pixel immediately to its
// left, averaged over rays that have one; intra occupancy counts how many
// of one ray's points share a single voxel.
inline LocalityProfile profile_locality(const AccessTrace& trace,
                                        uint32_t image_width) {
  if (image_width == 0)
    throw std::invalid_argument("profile: image width must be >= 1");
  const uint32_t L = trace.levels();
  LocalityProfile pr;
  pr.inter_rate.assign(L, std::numeric_limits<double>::quiet_NaN());
  pr.intra_max.assign(L, 0);
  pr.intra_mean.assign(L, 0.0);
  const size_t n = trace.point_count();
  if (n == 0 || L == 0) return pr;

  std::vector<double> rate_sum(L, 0.0);
  std::vector<uint64_t> rate_rays(L, 0), intra_sum(L, 0);
  std::vector<std::vector<uint64_t>> prev(L), cur(L);
  bool prev_valid = false;
  uint32_t prev_ray = 0;
  uint64_t ray_count = 0;

  size_t i = 0;
  while (i < n) {
    const uint32_t ray = trace.ray_of_point[i];
    size_t j = i;
    while (j < n && trace.ray_of_point[j] == ray) ++j;
    const bool has_left =
        prev_valid && ray % image_width != 0 && prev_ray + 1 == ray;
    ++ray_count;

    for (uint32_t l = 0; l < L; ++l) {
      cur[l].clear();
      for (size_t p = i; p < j; ++p) {
        const uint16_t* b = trace.base(p, l);
        cur[l].push_back((uint64_t(b[0]) << 32) | (uint64_t(b[1]) << 16) |
                         uint64_t(b[2]));
      }
      if (has_left) {
        uint64_t shared = 0;
        for (uint64_t key : cur[l])
          if (std::binary_search(prev[l].begin(), prev[l].end(), key))
            ++shared;
        rate_sum[l] += double(shared) / double(j - i);
        ++rate_rays[l];
      }
      std::sort(cur[l].begin(), cur[l].end());
      uint64_t run = 1, best = 1;
      for (size_t k = 1; k < cur[l].size(); ++k) {
        run = cur[l][k] == cur[l][k - 1] ? run + 1 : 1;
        best = std::max(best, run);
      }
      intra_sum[l] += best;
      pr.intra_max[l] = std::max(pr.intra_max[l], uint32_t(best));
      cur[l].erase(std::unique(cur[l].begin(), cur[l].end()), cur[l].end());
    }

    std::swap(prev, cur);
    prev_valid = true;
    prev_ray = ray;
    i = j;
  }

  for (uint32_t l = 0; l < L; ++l) {
    if (rate_rays[l]) pr.inter_rate[l] = rate_sum[l] / double(rate_rays[l]);
    pr.intra_mean[l] = double(intra_sum[l]) / double(ray_count);
  }
  return pr;
}

struct CompareRow {
  std::string name;
  uint64_t cycles = 0;
  double energy = 0.0;
  double cycle_speedup = 1.0;  // baseline cycles / this run's cycles
  double energy_ratio = 1.0;   // baseline energy / this run's energy
};

inline std::vector<CompareRow> compare(
    const std::vector<std::pair<std::string, SimStats>>& runs,
    size_t baseline = 0) {
  if (runs.empty()) throw std::invalid_argument("compare: no runs");
  if (baseline >= runs.size())
    throw std::out_of_range("compare: baseline index out of range");
  const SimStats& b = runs[baseline].second;
  auto ratio = [](double num, double den) {
    if (den == 0.0)
      return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return num / den;
  };
  std::vector<CompareRow> rows;
  rows.reserve(runs.size());
  for (const auto& [name, st] : runs) {
    CompareRow r;
    r.name = name;
    r.cycles = st.total_cycles;
    r.energy = st.energy_total;
    r.cycle_speedup = ratio(double(b.total_cycles), double(st.total_cycles));
    r.energy_ratio = ratio(b.energy_total, st.energy_total);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace asdr
