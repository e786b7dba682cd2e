#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "asdr/core.hpp"

namespace asdr {

// Ordered log of every encoded point: which ray, which sample index, and the
// voxel base vertex at every grid level. The 8 voxel corners are the base
// plus the unit offsets, so records stay compact while preserving every
// vertex address. Point order is canonical: pixel-major, then sample-major.
struct AccessTrace {
  std::vector<uint32_t> level_res;     // grid resolution per level
  std::vector<uint32_t> ray_of_point;  // per point
  std::vector<uint32_t> idx_in_ray;    // per point
  std::vector<uint16_t> bases;         // point-major, level-major, x y z

  uint32_t levels() const { return uint32_t(level_res.size()); }
  size_t point_count() const { return ray_of_point.size(); }

  const uint16_t* base(size_t point, uint32_t level) const {
    return &bases[(point * levels() + level) * 3];
  }

  void append_point(uint32_t ray, uint32_t idx, const uint16_t* lv_bases) {
    ray_of_point.push_back(ray);
    idx_in_ray.push_back(idx);
    bases.insert(bases.end(), lv_bases, lv_bases + size_t(levels()) * 3);
  }

  // Total vertex requests the trace implies (8 corners per point per level).
  uint64_t request_count() const {
    return uint64_t(point_count()) * levels() * 8;
  }
};

inline constexpr char kTraceMagic[8] = {'A', 'S', 'D', 'R', 'T', 'R', 'C', 'E'};
inline constexpr uint32_t kTraceVersion = 1;

inline void write_trace(const AccessTrace& t, const std::string& path) {
  atomic_write(path, [&](std::ostream& os) {
    write_bytes(os, kTraceMagic, 8);
    write_u32(os, kTraceVersion);
    write_u32(os, t.levels());
    write_u64(os, t.point_count());
    for (uint32_t r : t.level_res) write_u32(os, r);
    for (size_t p = 0; p < t.point_count(); ++p) {
      write_u32(os, t.ray_of_point[p]);
      write_u32(os, t.idx_in_ray[p]);
      const uint16_t* b = &t.bases[p * t.levels() * 3];
      for (uint32_t j = 0; j < t.levels() * 3; ++j) write_u16(os, b[j]);
    }
  });
}

inline AccessTrace read_trace(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("trace: cannot open " + path);
  char magic[8];
  read_bytes(is, magic, 8, "trace magic");
  for (int i = 0; i < 8; ++i)
    if (magic[i] != kTraceMagic[i])
      throw std::runtime_error("trace: bad magic");
  if (read_u32(is, "trace version") != kTraceVersion)
    throw std::runtime_error("trace: unsupported version");
  const uint32_t levels = read_u32(is, "trace levels");
  const uint64_t points = read_u64(is, "trace points");
  if (levels == 0 || levels > 64)
    throw std::runtime_error("trace: implausible level count");
  AccessTrace t;
  t.level_res.resize(levels);
  for (uint32_t& r : t.level_res) r = read_u32(is, "trace level res");
  t.ray_of_point.reserve(points);
  t.idx_in_ray.reserve(points);
  t.bases.reserve(points * levels * 3);
  for (uint64_t p = 0; p < points; ++p) {
    t.ray_of_point.push_back(read_u32(is, "trace ray id"));
    t.idx_in_ray.push_back(read_u32(is, "trace point idx"));
    for (uint32_t j = 0; j < levels * 3; ++j)
      t.bases.push_back(read_u16(is, "trace base"));
  }
  return t;
}

}  // namespace asdr
