#pragma once
// Multi-resolution voxel-grid feature encoding: geometric level schedule,
// spatial-hash / dense logical indexing, trilinear interpolation of per-level
// feature tables, field baking, and the on-disk table format.
//
// Table file layout ("ASDRGRID", all little-endian):
//   char[8] magic, u32 version, u32 levels, u64 table_size, u32 features,
//   u32 res_min, u32 res_max, u64 seed, u64 prime_x, u64 prime_y, u64 prime_z,
//   then levels*table_size*features f32 values, level-major.

#include <algorithm>
#include <cstdint>

#include "core.hpp"

namespace asdr {

struct GridConfig {
  uint32_t levels = 16;
  uint64_t table_size = uint64_t(1) << 19;  // entries per level, power of two
  uint32_t features = 4;                    // values per entry
  uint32_t res_min = 16;                    // coarsest cells per axis
  uint32_t res_max = 512;                   // finest cells per axis
  // Per-axis hash multipliers. prime_x = 1 keeps one axis coherent in the
  // table, which is what makes hashed lookups cache-friendly along x.
  uint64_t prime_x = 1;
  uint64_t prime_y = 2654435761ull;
  uint64_t prime_z = 805459861ull;
  uint64_t seed = 1;

  void validate() const {
    if (levels < 1) throw std::invalid_argument("grid: levels must be >= 1");
    if (table_size == 0 || (table_size & (table_size - 1)) != 0)
      throw std::invalid_argument("grid: table_size must be a power of two");
    if (features < 1) throw std::invalid_argument("grid: features must be >= 1");
    if (res_min < 1 || res_max < res_min)
      throw std::invalid_argument("grid: need 1 <= res_min <= res_max");
    if (prime_x < 1) throw std::invalid_argument("grid: prime_x must be >= 1");
    if (prime_y <= 0x10000 || (prime_y & 1) == 0)
      throw std::invalid_argument("grid: prime_y must be odd and > 2^16");
    if (prime_z <= 0x10000 || (prime_z & 1) == 0)
      throw std::invalid_argument("grid: prime_z must be odd and > 2^16");
  }
};

enum class MappingMode : uint8_t { dense = 0, hashed = 1 };

struct LevelSpec {
  uint32_t level = 0;
  uint32_t resolution = 0;   // N: cells per axis; vertices run 0..N inclusive
  MappingMode mode = MappingMode::hashed;
  uint32_t axis_bits = 0;    // ceil(log2(N+1)); padded axis = 1 << axis_bits
  uint64_t padded_domain = 0;  // (1 << axis_bits)^3
  uint64_t vertex_count = 0;   // (N+1)^3
};

inline uint32_t ceil_log2(uint64_t v) {
  uint32_t b = 0;
  while ((uint64_t(1) << b) < v) ++b;
  return b;
}

// Geometric resolution ramp res_min..res_max. A level stores its vertices
// densely when the power-of-two padded vertex domain fits in the table;
// otherwise vertices are spatially hashed.
inline std::vector<LevelSpec> build_levels(const GridConfig& cfg) {
  cfg.validate();
  const double ln_b =
      cfg.levels > 1 ? (std::log(double(cfg.res_max)) - std::log(double(cfg.res_min))) /
                           double(cfg.levels - 1)
                     : 0.0;
  std::vector<LevelSpec> out(cfg.levels);
  uint32_t prev = cfg.res_min;
  for (uint32_t l = 0; l < cfg.levels; ++l) {
    // The small epsilon rescues exact-integer products (both endpoints
    // included) from floating-point round-down.
    auto n = uint32_t(std::floor(double(cfg.res_min) * std::exp(ln_b * l) + 1e-6));
    n = std::max(n, prev);
    prev = n;
    LevelSpec& s = out[l];
    s.level = l;
    s.resolution = n;
    s.axis_bits = ceil_log2(uint64_t(n) + 1);
    s.padded_domain = uint64_t(1) << (3 * s.axis_bits);
    s.vertex_count = uint64_t(n + 1) * (n + 1) * (n + 1);
    s.mode = s.padded_domain <= cfg.table_size ? MappingMode::dense
                                               : MappingMode::hashed;
  }
  return out;
}

// (x*p1 xor y*p2 xor z*p3) mod table_size, with intentional 64-bit wraparound
// in the products.
inline uint64_t hash_index(uint32_t x, uint32_t y, uint32_t z,
                           const GridConfig& cfg) {
  const uint64_t h = uint64_t(x) * cfg.prime_x ^ uint64_t(y) * cfg.prime_y ^
                     uint64_t(z) * cfg.prime_z;
  return h & (cfg.table_size - 1);
}

// Row-major vertex index inside the power-of-two padded axis box.
inline uint64_t dense_logical_index(uint32_t x, uint32_t y, uint32_t z,
                                    const LevelSpec& spec) {
  const uint64_t X = uint64_t(1) << spec.axis_bits;
  return uint64_t(x) + X * (uint64_t(y) + X * uint64_t(z));
}

struct VoxelQuery {
  std::array<uint32_t, 3> base{};  // min corner; each in [0, N-1]
  std::array<double, 3> frac{};    // in [0,1]; exactly 1 only on the upper face

  // Corner k: bit 0 -> +x, bit 1 -> +y, bit 2 -> +z.
  std::array<uint32_t, 3> corner(int k) const {
    return {base[0] + (uint32_t(k) & 1), base[1] + (uint32_t(k) >> 1 & 1),
            base[2] + (uint32_t(k) >> 2 & 1)};
  }
  double weight(int k) const {
    double w = 1.0;
    for (int a = 0; a < 3; ++a) w *= (k >> a & 1) ? frac[a] : 1.0 - frac[a];
    return w;
  }
};

// Cell containing p at a given per-axis resolution. p == 1 lands in the last
// cell with frac 1 so interpolation still reads the boundary vertices.
inline VoxelQuery voxel_of(const Vec3& p, uint32_t resolution) {
  VoxelQuery q;
  const double pc[3] = {p.x, p.y, p.z};
  for (int a = 0; a < 3; ++a) {
    const double scaled = pc[a] * resolution;
    double b = std::floor(scaled);
    if (b > double(resolution) - 1.0) b = double(resolution) - 1.0;
    if (b < 0.0) b = 0.0;
    q.base[a] = uint32_t(b);
    q.frac[a] = scaled - b;
  }
  return q;
}

struct EmbeddingSet {
  GridConfig cfg;
  std::vector<LevelSpec> levels;
  std::vector<float> data;  // ((level * table_size) + entry) * features + f

  static EmbeddingSet seeded(const GridConfig& cfg) {
    EmbeddingSet s;
    s.cfg = cfg;
    s.levels = build_levels(cfg);
    s.data.resize(size_t(cfg.levels) * cfg.table_size * cfg.features);
    std::mt19937_64 gen(cfg.seed);
    for (float& v : s.data) v = float(uniform_in(gen, -0.1, 0.1));
    return s;
  }

  float* entry(uint32_t level, uint64_t index) {
    return &data[(size_t(level) * cfg.table_size + index) * cfg.features];
  }
  const float* entry(uint32_t level, uint64_t index) const {
    return &data[(size_t(level) * cfg.table_size + index) * cfg.features];
  }

  uint64_t index_of(uint32_t level, uint32_t x, uint32_t y, uint32_t z) const {
    const LevelSpec& s = levels[level];
    return s.mode == MappingMode::dense ? dense_logical_index(x, y, z, s)
                                        : hash_index(x, y, z, cfg);
  }
};

// Trilinear feature gather at p for every level, written level-major into
// out[levels*features]. pre: p inside the unit cube (callers clamp first).
inline void encode_point_into(const Vec3& p, const EmbeddingSet& set,
                              double* out) {
  const uint32_t F = set.cfg.features;
  for (const LevelSpec& s : set.levels) {
    const VoxelQuery q = voxel_of(p, s.resolution);
    double* dst = out + size_t(s.level) * F;
    for (uint32_t f = 0; f < F; ++f) dst[f] = 0.0;
    for (int k = 0; k < 8; ++k) {
      const double w = q.weight(k);
      const auto c = q.corner(k);
      const float* e = set.entry(s.level, set.index_of(s.level, c[0], c[1], c[2]));
      for (uint32_t f = 0; f < F; ++f) dst[f] += w * e[f];
    }
  }
}

inline std::vector<double> encode_point(const Vec3& p, const EmbeddingSet& set) {
  std::vector<double> out(size_t(set.cfg.levels) * set.cfg.features);
  encode_point_into(p, set, out.data());
  return out;
}

// field_values stores the field tuple verbatim. mlp_passthrough pre-warps the
// tuple with the inverses of the heads' output nonlinearities (inverse
// softplus for density, logit for color) so that routing weights plus the
// standard activations recover the field.
enum class BakeEncoding { field_values, mlp_passthrough };

inline float encode_bake_density(double sigma, BakeEncoding enc) {
  if (enc == BakeEncoding::field_values) return float(sigma);
  // inverse softplus; clamp keeps empty space finite (softplus(-20) ~ 2e-9)
  const double raw = sigma > 1e-8 ? std::log(std::expm1(sigma)) : -20.0;
  return float(std::max(raw, -20.0));
}

inline float encode_bake_color(double c, BakeEncoding enc) {
  if (enc == BakeEncoding::field_values) return float(c);
  const double eps = 1e-3;  // keeps the logit finite for saturated channels
  const double v = std::clamp(c, eps, 1.0 - eps);
  return float(std::log(v / (1.0 - v)));
}

// Samples a field at every level vertex and writes [density, r, g, b, 0...]
// entries, vertices visited row-major (x fastest). On hashed levels colliding
// vertices resolve last-writer-wins, which the fixed visit order makes
// deterministic.
template <class DensityFn, class ColorFn>
inline void bake_from_field(EmbeddingSet& set, DensityFn&& density,
                            ColorFn&& color,
                            BakeEncoding enc = BakeEncoding::field_values) {
  if (set.cfg.features < 4)
    throw std::invalid_argument("bake: needs features >= 4");
  for (const LevelSpec& s : set.levels) {
    const uint32_t n = s.resolution;
    for (uint32_t z = 0; z <= n; ++z)
      for (uint32_t y = 0; y <= n; ++y)
        for (uint32_t x = 0; x <= n; ++x) {
          const Vec3 pos{double(x) / n, double(y) / n, double(z) / n};
          float* e = set.entry(s.level, set.index_of(s.level, x, y, z));
          e[0] = encode_bake_density(density(pos), enc);
          const Vec3 c = color(pos);
          e[1] = encode_bake_color(c.x, enc);
          e[2] = encode_bake_color(c.y, enc);
          e[3] = encode_bake_color(c.z, enc);
          for (uint32_t f = 4; f < set.cfg.features; ++f) e[f] = 0.0f;
        }
  }
}

inline constexpr char kGridMagic[8] = {'A', 'S', 'D', 'R', 'G', 'R', 'I', 'D'};
inline constexpr uint32_t kGridVersion = 1;

inline void dump_tables(const EmbeddingSet& set, const std::string& path) {
  atomic_write(path, [&](std::ostream& os) {
    write_bytes(os, kGridMagic, 8);
    write_u32(os, kGridVersion);
    write_u32(os, set.cfg.levels);
    write_u64(os, set.cfg.table_size);
    write_u32(os, set.cfg.features);
    write_u32(os, set.cfg.res_min);
    write_u32(os, set.cfg.res_max);
    write_u64(os, set.cfg.seed);
    write_u64(os, set.cfg.prime_x);
    write_u64(os, set.cfg.prime_y);
    write_u64(os, set.cfg.prime_z);
    for (float v : set.data) write_f32(os, v);
  });
}

inline EmbeddingSet load_tables(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open table file: " + path);
  char magic[8];
  read_bytes(is, magic, 8, "table magic");
  if (std::memcmp(magic, kGridMagic, 8) != 0)
    throw std::runtime_error("not a table file (bad magic): " + path);
  const uint32_t version = read_u32(is, "table version");
  if (version != kGridVersion)
    throw std::runtime_error("unsupported table version: " + path);
  EmbeddingSet set;
  set.cfg.levels = read_u32(is, "table levels");
  set.cfg.table_size = read_u64(is, "table size");
  set.cfg.features = read_u32(is, "table features");
  set.cfg.res_min = read_u32(is, "table res_min");
  set.cfg.res_max = read_u32(is, "table res_max");
  set.cfg.seed = read_u64(is, "table seed");
  set.cfg.prime_x = read_u64(is, "table prime_x");
  set.cfg.prime_y = read_u64(is, "table prime_y");
  set.cfg.prime_z = read_u64(is, "table prime_z");
  set.cfg.validate();
  set.levels = build_levels(set.cfg);
  const uint64_t count =
      uint64_t(set.cfg.levels) * set.cfg.table_size * set.cfg.features;
  if (count > (uint64_t(1) << 32))
    throw std::runtime_error("table payload implausibly large: " + path);
  set.data.resize(size_t(count));
  for (float& v : set.data) v = read_f32(is, "table payload");
  return set;
}

}  // namespace asdr
