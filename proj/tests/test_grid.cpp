#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <random>

#include "asdr/grid.hpp"
#include "oracles.hpp"

using namespace asdr;

TEST_CASE("level schedule: default 16-level geometric ramp") {
  GridConfig cfg;  // defaults: 16 levels, 16 -> 512
  auto levels = build_levels(cfg);
  REQUIRE(levels.size() == 16);

  // b = 2^(1/3) for these defaults, so N_l = floor(16 * 2^(l/3)).
  const uint32_t expected[16] = {16,  20,  25,  32,  40,  50,  64,  80,
                                 101, 128, 161, 203, 256, 322, 406, 512};
  for (size_t l = 0; l < 16; ++l) {
    CAPTURE(l);
    CHECK(levels[l].resolution == expected[l]);
  }

  // Cross-check against an independent extended-precision evaluation.
  auto ref = oracle::level_schedule(16, 16, 512);
  for (size_t l = 0; l < 16; ++l) CHECK(levels[l].resolution == ref[l]);
}

TEST_CASE("level schedule: endpoints, monotonicity, degenerate L=1") {
  GridConfig cfg;
  auto levels = build_levels(cfg);
  CHECK(levels.front().resolution == cfg.res_min);
  CHECK(levels.back().resolution == cfg.res_max);
  for (size_t l = 1; l < levels.size(); ++l)
    CHECK(levels[l].resolution >= levels[l - 1].resolution);

  GridConfig one = cfg;
  one.levels = 1;
  auto single = build_levels(one);
  REQUIRE(single.size() == 1);
  CHECK(single[0].resolution == cfg.res_min);

  GridConfig two = cfg;
  two.levels = 2;
  auto pair = build_levels(two);
  CHECK(pair[0].resolution == 16);
  CHECK(pair[1].resolution == 512);
}

TEST_CASE("level schedule: dense/hashed split at the default table size") {
  auto levels = build_levels(GridConfig{});
  // Dense iff the power-of-two padded vertex domain fits in T=2^19, i.e.
  // ceil(log2(N+1)) <= 6, i.e. N <= 63.
  for (const auto& s : levels) {
    CAPTURE(s.level, s.resolution);
    const bool dense = s.resolution <= 63;
    CHECK((s.mode == MappingMode::dense) == dense);
    CHECK(s.vertex_count == uint64_t(s.resolution + 1) * (s.resolution + 1) *
                                (s.resolution + 1));
    CHECK(s.padded_domain == uint64_t(1) << (3 * s.axis_bits));
    CHECK((uint64_t(1) << s.axis_bits) >= s.resolution + 1);
    CHECK((uint64_t(1) << s.axis_bits) < 2 * (uint64_t(s.resolution) + 1));
  }
  CHECK(levels[5].mode == MappingMode::dense);   // N=50 pads to 64^3 = 2^18
  CHECK(levels[6].mode == MappingMode::hashed);  // N=64 pads to 128^3 = 2^21
}

TEST_CASE("config validation rejects bad parameters") {
  GridConfig bad;
  bad.table_size = 3 << 10;  // not a power of two
  CHECK_THROWS_AS(build_levels(bad), std::invalid_argument);

  bad = GridConfig{};
  bad.levels = 0;
  CHECK_THROWS_AS(build_levels(bad), std::invalid_argument);

  bad = GridConfig{};
  bad.res_max = 8;  // < res_min
  CHECK_THROWS_AS(build_levels(bad), std::invalid_argument);

  bad = GridConfig{};
  bad.prime_y = 1024;  // even and too small
  CHECK_THROWS_AS(build_levels(bad), std::invalid_argument);

  bad = GridConfig{};
  bad.features = 0;
  CHECK_THROWS_AS(build_levels(bad), std::invalid_argument);
}

TEST_CASE("spatial hash: zero corner, known constants, wraparound oracle") {
  GridConfig cfg;
  CHECK(hash_index(0, 0, 0, cfg) == 0);

  // x contributes bare (prime_x = 1).
  CHECK(hash_index(7, 0, 0, cfg) == 7);

  std::mt19937_64 gen(77);
  for (int i = 0; i < 20000; ++i) {
    const uint32_t x = uint32_t(gen()), y = uint32_t(gen()), z = uint32_t(gen());
    const uint64_t want = oracle::hash3(x, y, z, cfg.prime_x, cfg.prime_y,
                                        cfg.prime_z, cfg.table_size);
    CHECK(hash_index(x, y, z, cfg) == want);
  }

  // Explicit wraparound: products exceed 2^64 and must truncate.
  const uint32_t big = 0xffffffffu;
  CHECK(hash_index(big, big, big, cfg) ==
        oracle::hash3(big, big, big, cfg.prime_x, cfg.prime_y, cfg.prime_z,
                      cfg.table_size));

  // Result always inside the table.
  GridConfig small = cfg;
  small.table_size = 1 << 8;
  for (int i = 0; i < 1000; ++i) {
    const uint64_t h = hash_index(uint32_t(gen()), uint32_t(gen()),
                                  uint32_t(gen()), small);
    CHECK(h < small.table_size);
  }
}

TEST_CASE("dense logical index: row-major with padded axes") {
  GridConfig cfg;
  auto levels = build_levels(cfg);
  const LevelSpec& l0 = levels[0];  // N=16, padded axis 32
  REQUIRE((uint64_t(1) << l0.axis_bits) == 32);
  CHECK(dense_logical_index(1, 2, 3, l0) == 3137);  // 1 + 32*2 + 32*32*3
  CHECK(dense_logical_index(0, 0, 0, l0) == 0);
  CHECK(dense_logical_index(16, 16, 16, l0) == 16 + 32 * 16 + 1024 * 16);
  // Stays inside the padded domain for every vertex.
  CHECK(dense_logical_index(l0.resolution, l0.resolution, l0.resolution, l0) <
        l0.padded_domain);
}

TEST_CASE("voxel_of: interior, lattice, and upper-boundary conventions") {
  VoxelQuery q = voxel_of({0.53125, 0.5, 0.5}, 16);
  CHECK(q.base == std::array<uint32_t, 3>{8, 8, 8});
  CHECK(q.frac[0] == Catch::Approx(0.5));
  CHECK(q.frac[1] == Catch::Approx(0.0));
  CHECK(q.frac[2] == Catch::Approx(0.0));

  // p = 1.0 lands in the last cell with frac 1.
  q = voxel_of({1.0, 1.0, 1.0}, 16);
  CHECK(q.base == std::array<uint32_t, 3>{15, 15, 15});
  CHECK(q.frac[0] == Catch::Approx(1.0));

  q = voxel_of({0.0, 0.0, 0.0}, 16);
  CHECK(q.base == std::array<uint32_t, 3>{0, 0, 0});

  // Weights form a partition of unity; corners enumerate the cube.
  std::mt19937_64 gen(3);
  for (int i = 0; i < 500; ++i) {
    const Vec3 p{canonical_u01(gen), canonical_u01(gen), canonical_u01(gen)};
    const uint32_t n = 1 + uint32_t(gen() % 500);
    q = voxel_of(p, n);
    double wsum = 0;
    for (int k = 0; k < 8; ++k) {
      wsum += q.weight(k);
      const auto c = q.corner(k);
      for (int a = 0; a < 3; ++a) {
        CHECK(c[a] >= q.base[a]);
        CHECK(c[a] <= q.base[a] + 1);
        CHECK(c[a] <= n);
      }
      CHECK(q.weight(k) >= 0.0);
    }
    CHECK(wsum == Catch::Approx(1.0).epsilon(1e-12));
    for (int a = 0; a < 3; ++a) {
      CHECK(q.base[a] <= n - 1);
      CHECK(q.frac[a] >= 0.0);
      CHECK(q.frac[a] <= 1.0);
    }
  }
}

namespace {

// Trilinear gather re-implemented from scratch against the public table
// accessors, with its own hash and corner enumeration.
std::vector<double> encode_ref(const Vec3& p, const EmbeddingSet& set) {
  const uint32_t F = set.cfg.features;
  std::vector<double> out(set.levels.size() * F, 0.0);
  for (const LevelSpec& s : set.levels) {
    const double coords[3] = {p.x, p.y, p.z};
    uint32_t base[3];
    double fr[3];
    for (int a = 0; a < 3; ++a) {
      double scaled = coords[a] * s.resolution;
      double fl = std::floor(scaled);
      if (fl > s.resolution - 1.0) fl = s.resolution - 1.0;
      if (fl < 0) fl = 0;
      base[a] = uint32_t(fl);
      fr[a] = scaled - fl;
    }
    for (int dz = 0; dz <= 1; ++dz)
      for (int dy = 0; dy <= 1; ++dy)
        for (int dx = 0; dx <= 1; ++dx) {
          const uint32_t cx = base[0] + dx, cy = base[1] + dy, cz = base[2] + dz;
          uint64_t idx;
          if (s.mode == MappingMode::dense) {
            const uint64_t X = uint64_t(1) << s.axis_bits;
            idx = cx + X * cy + X * X * cz;
          } else {
            idx = oracle::hash3(cx, cy, cz, set.cfg.prime_x, set.cfg.prime_y,
                                set.cfg.prime_z, set.cfg.table_size);
          }
          const double w = (dx ? fr[0] : 1 - fr[0]) * (dy ? fr[1] : 1 - fr[1]) *
                           (dz ? fr[2] : 1 - fr[2]);
          const float* e = set.entry(s.level, idx);
          for (uint32_t f = 0; f < F; ++f) out[s.level * F + f] += w * e[f];
        }
  }
  return out;
}

}  // namespace

TEST_CASE("encode_point matches an independent trilinear gather") {
  GridConfig cfg;
  cfg.levels = 6;
  cfg.table_size = 1 << 14;
  cfg.res_max = 96;
  cfg.seed = 42;
  EmbeddingSet set = EmbeddingSet::seeded(cfg);

  std::mt19937_64 gen(11);
  for (int i = 0; i < 200; ++i) {
    const Vec3 p{canonical_u01(gen), canonical_u01(gen), canonical_u01(gen)};
    const auto got = encode_point(p, set);
    const auto want = encode_ref(p, set);
    REQUIRE(got.size() == want.size());
    for (size_t j = 0; j < got.size(); ++j)
      CHECK(got[j] == Catch::Approx(want[j]).margin(1e-9));
  }
}

TEST_CASE("encode_point reproduces the vertex entry exactly on lattice points") {
  GridConfig cfg;
  cfg.levels = 1;
  cfg.table_size = 1 << 15;  // N=16 padded domain fits: dense
  cfg.res_min = cfg.res_max = 16;
  EmbeddingSet set = EmbeddingSet::seeded(cfg);
  REQUIRE(set.levels[0].mode == MappingMode::dense);

  const Vec3 p{0.5, 0.25, 0.75};  // vertex (8, 4, 12) of the 16^3 lattice
  const auto feats = encode_point(p, set);
  const float* e = set.entry(0, set.index_of(0, 8, 4, 12));
  for (uint32_t f = 0; f < cfg.features; ++f)
    CHECK(feats[f] == Catch::Approx(double(e[f])).margin(1e-15));
}

TEST_CASE("seeded tables are deterministic in the seed") {
  GridConfig cfg;
  cfg.levels = 2;
  cfg.table_size = 1 << 10;
  cfg.res_max = 32;
  EmbeddingSet a = EmbeddingSet::seeded(cfg);
  EmbeddingSet b = EmbeddingSet::seeded(cfg);
  CHECK(a.data == b.data);
  cfg.seed = 2;
  EmbeddingSet c = EmbeddingSet::seeded(cfg);
  CHECK(a.data != c.data);
}

TEST_CASE("bake: constant field fills dense levels with the field tuple") {
  GridConfig cfg;
  cfg.levels = 2;
  cfg.table_size = 1 << 15;
  cfg.res_min = 8;
  cfg.res_max = 16;
  EmbeddingSet set = EmbeddingSet::seeded(cfg);
  const double s = 2.5;
  bake_from_field(
      set, [&](const Vec3&) { return s; },
      [](const Vec3&) { return Vec3{1, 0, 0}; });

  for (const LevelSpec& spec : set.levels) {
    REQUIRE(spec.mode == MappingMode::dense);
    const uint32_t n = spec.resolution;
    for (uint32_t z = 0; z <= n; z += 4)
      for (uint32_t y = 0; y <= n; y += 4)
        for (uint32_t x = 0; x <= n; x += 4) {
          const float* e = set.entry(spec.level, set.index_of(spec.level, x, y, z));
          CHECK(e[0] == Catch::Approx(s));
          CHECK(e[1] == Catch::Approx(1.0));
          CHECK(e[2] == Catch::Approx(0.0));
          CHECK(e[3] == Catch::Approx(0.0));
        }
  }
}

TEST_CASE("bake: sphere field writes the field's vertex value") {
  GridConfig cfg;
  cfg.levels = 1;
  cfg.table_size = 1 << 15;
  cfg.res_min = cfg.res_max = 16;
  EmbeddingSet set = EmbeddingSet::seeded(cfg);

  const Vec3 center{0.5, 0.5, 0.5};
  const double radius = 0.3;
  auto density = [&](const Vec3& p) {
    return (p - center).norm() < radius ? 7.0 : 0.0;
  };
  bake_from_field(set, density, [](const Vec3&) { return Vec3{0, 1, 0}; });

  // Vertex (8,8,4) sits at p=(0.5,0.5,0.25), distance 0.25 < 0.3: inside.
  const Vec3 vp{0.5, 0.5, 0.25};
  REQUIRE(density(vp) == 7.0);
  const float* e = set.entry(0, set.index_of(0, 8, 8, 4));
  CHECK(e[0] == Catch::Approx(7.0));

  // Vertex (0,0,0) is far outside the sphere.
  CHECK(set.entry(0, set.index_of(0, 0, 0, 0))[0] == Catch::Approx(0.0));
}

TEST_CASE("bake with passthrough encoding round-trips the head activations") {
  GridConfig cfg;
  cfg.levels = 1;
  cfg.table_size = 1 << 12;
  cfg.res_min = cfg.res_max = 8;
  EmbeddingSet set = EmbeddingSet::seeded(cfg);
  bake_from_field(
      set, [](const Vec3&) { return 3.0; },
      [](const Vec3&) {
        return Vec3{0.25, 0.5, 0.9};
      },
      BakeEncoding::mlp_passthrough);
  const float* e = set.entry(0, set.index_of(0, 2, 2, 2));
  auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  auto softplus = [](double v) { return std::log1p(std::exp(v)); };
  CHECK(softplus(e[0]) == Catch::Approx(3.0).margin(1e-5));
  CHECK(sigmoid(e[1]) == Catch::Approx(0.25).margin(1e-4));
  CHECK(sigmoid(e[2]) == Catch::Approx(0.5).margin(1e-4));
  CHECK(sigmoid(e[3]) == Catch::Approx(0.9).margin(1e-4));

  // Empty space stays (numerically) empty through the round trip.
  bake_from_field(
      set, [](const Vec3&) { return 0.0; },
      [](const Vec3&) { return Vec3{0, 0, 0}; }, BakeEncoding::mlp_passthrough);
  CHECK(softplus(set.entry(0, set.index_of(0, 1, 1, 1))[0]) < 1e-6);
}

TEST_CASE("table file roundtrip, bad magic, truncation") {
  GridConfig cfg;
  cfg.levels = 3;
  cfg.table_size = 1 << 10;
  cfg.res_min = 4;
  cfg.res_max = 16;
  cfg.seed = 9;
  EmbeddingSet set = EmbeddingSet::seeded(cfg);

  const std::string path = "grid_roundtrip.bin";
  dump_tables(set, path);
  EmbeddingSet back = load_tables(path);
  CHECK(back.cfg.levels == cfg.levels);
  CHECK(back.cfg.table_size == cfg.table_size);
  CHECK(back.cfg.features == cfg.features);
  CHECK(back.cfg.res_min == cfg.res_min);
  CHECK(back.cfg.res_max == cfg.res_max);
  CHECK(back.cfg.seed == cfg.seed);
  CHECK(back.data == set.data);

  {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << "NOTAGRID garbage";
  }
  CHECK_THROWS_AS(load_tables(path), std::runtime_error);

  dump_tables(set, path);
  {
    std::ifstream is(path, std::ios::binary);
    std::vector<char> head(64);
    is.read(head.data(), 64);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os.write(head.data(), 64);
  }
  CHECK_THROWS_AS(load_tables(path), std::runtime_error);
  std::remove(path.c_str());
}
