#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "asdr/core.hpp"
#include "asdr/grid.hpp"
#include "asdr/mlp.hpp"

namespace asdr {

enum class SceneKind { empty, spheres, boxes, grid };

inline SceneKind scene_kind_from(const std::string& name) {
  if (name == "empty") return SceneKind::empty;
  if (name == "spheres") return SceneKind::spheres;
  if (name == "boxes") return SceneKind::boxes;
  throw std::invalid_argument("unknown scene kind: " + name);
}

// Analytic primitive: `extent` is a sphere radius or a box half-extent.
struct SceneObject {
  Vec3 center{};
  double extent = 0.1;
  Vec3 color{1, 1, 1};
};

// Either a set of analytic primitives with a smooth density shell, or a
// grid-backed field (embedding tables + the two MLP heads).
struct SceneModel {
  SceneKind kind = SceneKind::empty;
  uint64_t seed = 1;

  // analytic variants
  std::vector<SceneObject> objects;
  double sigma_max = 400.0;
  double shell = 0.03;

  // grid variant
  std::shared_ptr<EmbeddingSet> tables;
  std::shared_ptr<MLPPair> heads;

  bool is_grid() const { return kind == SceneKind::grid; }

  // Signed distance to the nearest primitive surface (analytic kinds).
  double signed_distance(const Vec3& p, size_t* nearest = nullptr) const {
    double best = 1e30;
    size_t best_i = 0;
    for (size_t i = 0; i < objects.size(); ++i) {
      const SceneObject& o = objects[i];
      double d;
      if (kind == SceneKind::boxes) {
        const Vec3 q{std::abs(p.x - o.center.x) - o.extent,
                     std::abs(p.y - o.center.y) - o.extent,
                     std::abs(p.z - o.center.z) - o.extent};
        const Vec3 qp{std::max(q.x, 0.0), std::max(q.y, 0.0),
                      std::max(q.z, 0.0)};
        d = qp.norm() + std::min(std::max({q.x, q.y, q.z}), 0.0);
      } else {
        d = (p - o.center).norm() - o.extent;
      }
      if (d < best) {
        best = d;
        best_i = i;
      }
    }
    if (nearest) *nearest = best_i;
    return best;
  }

  // Extinction: zero outside the surface, ramping smoothly to sigma_max
  // across a shell of the configured width just inside it.
  double density(const Vec3& p) const {
    if (objects.empty()) return 0.0;
    const double d = signed_distance(p);
    if (d >= 0.0) return 0.0;
    const double u = std::min(1.0, -d / shell);
    return sigma_max * u * u * (3.0 - 2.0 * u);
  }

  // Emitted color: the nearest primitive's color, defined everywhere so
  // interpolated color queries stay well behaved.
  Vec3 color_at(const Vec3& p) const {
    if (objects.empty()) return {0, 0, 0};
    size_t i = 0;
    signed_distance(p, &i);
    return objects[i].color;
  }
};

// Deterministic procedural scenes. The sphere scene keeps all primitives
// well inside the unit cube so a diagonal camera sees ample empty space.
inline SceneModel make_scene(SceneKind kind, uint64_t seed) {
  SceneModel s;
  s.kind = kind;
  s.seed = seed;
  if (kind == SceneKind::empty) return s;
  if (kind == SceneKind::grid)
    throw std::invalid_argument("make_scene: grid scenes come from baking");

  std::mt19937_64 gen(seed);
  const Vec3 anchors[3] = {{0.40, 0.42, 0.60}, {0.62, 0.55, 0.44},
                           {0.46, 0.64, 0.38}};
  const Vec3 palette[3] = {{0.90, 0.20, 0.15}, {0.20, 0.75, 0.30},
                           {0.25, 0.35, 0.90}};
  const double base_extent = kind == SceneKind::boxes ? 0.09 : 0.11;
  for (int i = 0; i < 3; ++i) {
    SceneObject o;
    o.center = {anchors[i].x + uniform_in(gen, -0.04, 0.04),
                anchors[i].y + uniform_in(gen, -0.04, 0.04),
                anchors[i].z + uniform_in(gen, -0.04, 0.04)};
    o.extent = base_extent + uniform_in(gen, -0.02, 0.03);
    o.color = {clamp01(palette[i].x + uniform_in(gen, -0.05, 0.05)),
               clamp01(palette[i].y + uniform_in(gen, -0.05, 0.05)),
               clamp01(palette[i].z + uniform_in(gen, -0.05, 0.05))};
    s.objects.push_back(o);
  }
  return s;
}

inline SceneModel make_scene(const std::string& kind, uint64_t seed) {
  return make_scene(scene_kind_from(kind), seed);
}

// Bakes an analytic scene into embedding tables with passthrough heads: the
// grid pipeline then reproduces the analytic fields up to trilinear error.
inline SceneModel bake_scene(const SceneModel& analytic,
                             const GridConfig& cfg) {
  if (analytic.is_grid())
    throw std::invalid_argument("bake_scene: input already grid-backed");
  SceneModel s;
  s.kind = SceneKind::grid;
  s.seed = analytic.seed;
  s.tables = std::make_shared<EmbeddingSet>(EmbeddingSet::seeded(cfg));
  bake_from_field(
      *s.tables, [&](const Vec3& p) { return analytic.density(p); },
      [&](const Vec3& p) { return analytic.color_at(p); },
      BakeEncoding::mlp_passthrough);
  s.heads = std::make_shared<MLPPair>(
      make_mlp_preset("passthrough", cfg, analytic.seed));
  return s;
}

}  // namespace asdr
