#pragma once
// Shared basics: 3-vectors, deterministic RNG helpers, little-endian binary IO,
// and atomic file writing. Everything else in the library builds on these.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace asdr {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const { return *this / norm(); }
  double operator[](int a) const { return a == 0 ? x : (a == 1 ? y : z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

inline Vec3 clamp_unit_cube(const Vec3& p) {
  return {clamp01(p.x), clamp01(p.y), clamp01(p.z)};
}

// Uniform double in [0,1) from raw engine output. The standard pins
// mt19937_64's bit sequence but not uniform_real_distribution's algorithm,
// so map the bits manually to stay reproducible everywhere.
inline double canonical_u01(std::mt19937_64& gen) {
  return double(gen() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * canonical_u01(gen);
}

// ---------------------------------------------------------------------------
// Little-endian binary IO. Short reads and write failures throw.
// ---------------------------------------------------------------------------

inline void write_bytes(std::ostream& os, const void* p, size_t n) {
  os.write(static_cast<const char*>(p), std::streamsize(n));
}

inline void write_u16(std::ostream& os, uint16_t v) {
  unsigned char b[2] = {(unsigned char)(v & 0xff), (unsigned char)(v >> 8)};
  write_bytes(os, b, 2);
}

inline void write_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = (unsigned char)(v >> (8 * i));
  write_bytes(os, b, 4);
}

inline void write_u64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (unsigned char)(v >> (8 * i));
  write_bytes(os, b, 8);
}

inline void write_f32(std::ostream& os, float v) {
  uint32_t u;
  std::memcpy(&u, &v, 4);
  write_u32(os, u);
}

inline void read_bytes(std::istream& is, void* p, size_t n, const char* what) {
  is.read(static_cast<char*>(p), std::streamsize(n));
  if (size_t(is.gcount()) != n)
    throw std::runtime_error(std::string("truncated read: ") + what);
}

inline uint16_t read_u16(std::istream& is, const char* what) {
  unsigned char b[2];
  read_bytes(is, b, 2, what);
  return uint16_t(b[0]) | uint16_t(b[1]) << 8;
}

inline uint32_t read_u32(std::istream& is, const char* what) {
  unsigned char b[4];
  read_bytes(is, b, 4, what);
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = v << 8 | b[i];
  return v;
}

inline uint64_t read_u64(std::istream& is, const char* what) {
  unsigned char b[8];
  read_bytes(is, b, 8, what);
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = v << 8 | b[i];
  return v;
}

inline float read_f32(std::istream& is, const char* what) {
  uint32_t u = read_u32(is, what);
  float v;
  std::memcpy(&v, &u, 4);
  return v;
}

// Writes through a temp file and renames into place so readers never observe
// a partially written artifact.
template <class Fn>
inline void atomic_write(const std::string& path, Fn&& write_fn) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for write: " + tmp);
    write_fn(os);
    os.flush();
    if (!os) {
      std::remove(tmp.c_str());
      throw std::runtime_error("write failed: " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("rename failed: " + path);
  }
}

}  // namespace asdr
