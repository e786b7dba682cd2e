#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "asdr/core.hpp"

namespace asdr {

enum class ColorSource : uint8_t { computed, interpolated };

// One marched point on a ray: position along the ray, segment extent,
// extinction, and emitted color.
struct PointSample {
  double t = 0.0;
  double delta = 0.0;
  double sigma = 0.0;
  Vec3 color{};
  ColorSource source = ColorSource::computed;
};

// Front-to-back compositing result. `weights` holds T_i * alpha_i for every
// processed sample; `residual` is the transmittance left after the last one.
// `terminated_at` is the index whose processing dropped transmittance below
// the early-stop threshold, or -1 when the full list was processed.
struct RayComposite {
  Vec3 color{};
  std::vector<double> weights;
  double residual = 1.0;
  int terminated_at = -1;
};

inline double alpha_from(double sigma, double delta) {
  return 1.0 - std::exp(-sigma * delta);
}

namespace detail {

inline RayComposite composite_impl(const std::vector<PointSample>& samples,
                                   bool early, double eps) {
  RayComposite out;
  out.weights.reserve(samples.size());
  double trans = 1.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double a = alpha_from(samples[i].sigma, samples[i].delta);
    const double w = trans * a;
    out.weights.push_back(w);
    out.color += samples[i].color * w;
    trans *= 1.0 - a;
    if (early && trans < eps) {
      out.terminated_at = int(i);
      break;
    }
  }
  out.residual = trans;
  return out;
}

}  // namespace detail

inline RayComposite composite(const std::vector<PointSample>& samples) {
  return detail::composite_impl(samples, false, 0.0);
}

// Stops after the first sample that leaves less than `eps` transmittance;
// the dropped tail can change each channel by at most `eps`.
inline RayComposite composite_early(const std::vector<PointSample>& samples,
                                    double eps) {
  return detail::composite_impl(samples, true, eps);
}

// Keeps k samples at indices round(j * N / k); duplicate indices collapse.
// Segment extents are recomputed as gaps between kept positions, with the
// last extent spanning to the end of the original ray. k >= N is identity.
inline std::vector<PointSample> subsample(
    const std::vector<PointSample>& samples, uint32_t k) {
  const size_t n = samples.size();
  if (n == 0 || k == 0) return {};
  if (size_t(k) >= n) return samples;

  std::vector<size_t> kept;
  kept.reserve(k);
  for (uint32_t j = 0; j < k; ++j) {
    const size_t idx = std::min(
        n - 1, size_t(std::llround(double(j) * double(n) / double(k))));
    if (kept.empty() || idx > kept.back()) kept.push_back(idx);
  }
  if (kept.size() == n) return samples;

  std::vector<PointSample> out;
  out.reserve(kept.size());
  for (size_t idx : kept) out.push_back(samples[idx]);
  const double ray_end = samples.back().t + samples.back().delta;
  for (size_t j = 0; j + 1 < out.size(); ++j)
    out[j].delta = out[j + 1].t - out[j].t;
  out.back().delta = ray_end - out.back().t;
  return out;
}

// Rendering difficulty: channelwise max absolute color difference between a
// full-rate composite and a cheaper candidate.
inline double difficulty(const RayComposite& full,
                         const RayComposite& candidate) {
  const Vec3 d = full.color - candidate.color;
  return std::max({std::abs(d.x), std::abs(d.y), std::abs(d.z)});
}

// Probe sample-count candidates: the full count divided by 16, 8, 4, 2,
// floored, never below 4.
inline std::vector<uint32_t> candidate_counts(uint32_t ns) {
  std::vector<uint32_t> c;
  for (uint32_t div : {16u, 8u, 4u, 2u}) c.push_back(std::max(4u, ns / div));
  return c;
}

// Smallest candidate whose difficulty stays within `delta`; the full count
// when none qualifies (including any negative threshold).
inline uint32_t choose_count(const std::vector<double>& rds,
                             const std::vector<uint32_t>& candidates,
                             uint32_t ns, double delta) {
  if (rds.size() != candidates.size())
    throw std::invalid_argument("choose_count: rds/candidates size mismatch");
  for (size_t i = 0; i < candidates.size(); ++i)
    if (rds[i] <= delta) return candidates[i];
  return ns;
}

// Per-pixel sample budget for one frame.
struct PixelPlan {
  uint32_t width = 0;
  uint32_t height = 0;
  uint32_t probe_stride = 1;
  uint32_t full_count = 0;
  double threshold = 0.0;
  std::vector<uint32_t> counts;  // row-major, width * height

  double mean_count() const {
    if (counts.empty()) return 0.0;
    double s = 0;
    for (uint32_t c : counts) s += c;
    return s / double(counts.size());
  }
};

// Expands a probe grid (one chosen count per probe pixel, gw x gh row-major,
// probes at pixel (i*d, j*d)) to a full-resolution plan: bilinear in probe
// space, rounded up, clamped into [min_count, ns]. Pixels beyond the last
// probe row/column clamp to the nearest probe.
inline PixelPlan plan_from_probe(const std::vector<uint32_t>& probe_counts,
                                 uint32_t gw, uint32_t gh, uint32_t d,
                                 uint32_t width, uint32_t height, uint32_t ns,
                                 double delta, uint32_t min_count) {
  if (gw == 0 || gh == 0 || probe_counts.size() != size_t(gw) * gh)
    throw std::invalid_argument("plan_from_probe: bad probe grid");
  if (d == 0) throw std::invalid_argument("plan_from_probe: stride 0");

  PixelPlan plan;
  plan.width = width;
  plan.height = height;
  plan.probe_stride = d;
  plan.full_count = ns;
  plan.threshold = delta;
  plan.counts.resize(size_t(width) * height);

  auto probe = [&](uint32_t i, uint32_t j) {
    return double(probe_counts[size_t(j) * gw + i]);
  };

  for (uint32_t y = 0; y < height; ++y) {
    const double gy = double(y) / double(d);
    uint32_t j0 = std::min(gh - 1, uint32_t(gy));
    uint32_t j1 = std::min(gh - 1, j0 + 1);
    const double fy = std::min(1.0, std::max(0.0, gy - double(j0)));
    for (uint32_t x = 0; x < width; ++x) {
      const double gx = double(x) / double(d);
      uint32_t i0 = std::min(gw - 1, uint32_t(gx));
      uint32_t i1 = std::min(gw - 1, i0 + 1);
      const double fx = std::min(1.0, std::max(0.0, gx - double(i0)));

      const double top = probe(i0, j0) * (1 - fx) + probe(i1, j0) * fx;
      const double bot = probe(i0, j1) * (1 - fx) + probe(i1, j1) * fx;
      const double v = top * (1 - fy) + bot * fy;
      uint32_t c = uint32_t(std::ceil(v - 1e-9));
      c = std::min(ns, std::max(min_count, c));
      plan.counts[size_t(y) * width + x] = c;
    }
  }
  return plan;
}

// Anchor indices {0, n, 2n, ...} below `count`.
inline std::vector<uint32_t> group_anchors(uint32_t count, uint32_t n) {
  if (n == 0) throw std::invalid_argument("group_anchors: n == 0");
  std::vector<uint32_t> a;
  for (uint32_t i = 0; i < count; i += n) a.push_back(i);
  return a;
}

// Replaces colors between consecutive anchors with a linear blend in t; the
// anchors themselves keep their computed colors. Points past the last anchor
// copy its color. Touched points are marked interpolated.
inline void interpolate_colors(std::vector<PointSample>& samples,
                               const std::vector<uint32_t>& anchors) {
  if (anchors.empty()) return;
  for (size_t k = 0; k < anchors.size(); ++k) {
    const uint32_t a = anchors[k];
    const uint32_t b =
        k + 1 < anchors.size() ? anchors[k + 1] : uint32_t(samples.size());
    if (a >= samples.size()) break;
    const PointSample& pa = samples[a];
    const bool has_next = k + 1 < anchors.size() && b < samples.size();
    for (uint32_t i = a + 1; i < b && i < samples.size(); ++i) {
      if (has_next) {
        const PointSample& pb = samples[b];
        const double span = pb.t - pa.t;
        const double u = span > 0 ? (samples[i].t - pa.t) / span : 0.0;
        samples[i].color = pa.color * (1.0 - u) + pb.color * u;
      } else {
        samples[i].color = pa.color;
      }
      samples[i].source = ColorSource::interpolated;
    }
  }
}

}  // namespace asdr
