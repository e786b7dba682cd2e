#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "asdr/core.hpp"

namespace asdr {

struct ImageBuffer {
  uint32_t width = 0;
  uint32_t height = 0;
  std::vector<double> rgb;  // row-major, 3 per pixel, values in [0,1]

  ImageBuffer() = default;
  ImageBuffer(uint32_t w, uint32_t h)
      : width(w), height(h), rgb(size_t(w) * h * 3, 0.0) {}

  double* pixel(uint32_t x, uint32_t y) {
    return &rgb[(size_t(y) * width + x) * 3];
  }
  const double* pixel(uint32_t x, uint32_t y) const {
    return &rgb[(size_t(y) * width + x) * 3];
  }
  void set(uint32_t x, uint32_t y, const Vec3& c) {
    double* p = pixel(x, y);
    p[0] = clamp01(c.x);
    p[1] = clamp01(c.y);
    p[2] = clamp01(c.z);
  }
};

// Peak signal-to-noise ratio over all channels on the [0,1] scale.
// Identical images yield the +infinity sentinel.
inline double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("psnr: dimension mismatch");
  double se = 0.0;
  for (size_t i = 0; i < a.rgb.size(); ++i) {
    const double d = a.rgb[i] - b.rgb[i];
    se += d * d;
  }
  if (a.rgb.empty()) return std::numeric_limits<double>::infinity();
  const double mse = se / double(a.rgb.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

namespace detail {

inline std::vector<double> to_gray(const ImageBuffer& img) {
  std::vector<double> g(size_t(img.width) * img.height);
  for (size_t i = 0; i < g.size(); ++i)
    g[i] = 0.2126 * img.rgb[3 * i] + 0.7152 * img.rgb[3 * i + 1] +
           0.0722 * img.rgb[3 * i + 2];
  return g;
}

struct WindowStats {
  double mean_a, mean_b, var_a, var_b, cov;
};

inline WindowStats window_stats(const std::vector<double>& a,
                                const std::vector<double>& b, uint32_t stride_w,
                                uint32_t x0, uint32_t y0, uint32_t wx,
                                uint32_t wy) {
  double sa = 0, sb = 0;
  const double n = double(wx) * wy;
  for (uint32_t y = y0; y < y0 + wy; ++y)
    for (uint32_t x = x0; x < x0 + wx; ++x) {
      sa += a[size_t(y) * stride_w + x];
      sb += b[size_t(y) * stride_w + x];
    }
  const double ma = sa / n, mb = sb / n;
  double va = 0, vb = 0, cab = 0;
  for (uint32_t y = y0; y < y0 + wy; ++y)
    for (uint32_t x = x0; x < x0 + wx; ++x) {
      const double da = a[size_t(y) * stride_w + x] - ma;
      const double db = b[size_t(y) * stride_w + x] - mb;
      va += da * da;
      vb += db * db;
      cab += da * db;
    }
  return {ma, mb, va / n, vb / n, cab / n};
}

}  // namespace detail

// Single-scale structural similarity on the luma channel: 8x8 windows at
// stride 4, k1=0.01, k2=0.03, dynamic range 1. Images smaller than one
// window are treated as a single full-image window.
inline double ssim(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("ssim: dimension mismatch");
  if (a.width == 0 || a.height == 0)
    throw std::invalid_argument("ssim: empty image");
  const std::vector<double> ga = detail::to_gray(a);
  const std::vector<double> gb = detail::to_gray(b);

  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const uint32_t win = 8, stride = 4;
  const uint32_t wx = std::min(win, a.width), wy = std::min(win, a.height);

  double total = 0.0;
  size_t count = 0;
  for (uint32_t y0 = 0; y0 + wy <= a.height; y0 += stride) {
    for (uint32_t x0 = 0; x0 + wx <= a.width; x0 += stride) {
      const auto s = detail::window_stats(ga, gb, a.width, x0, y0, wx, wy);
      const double num = (2 * s.mean_a * s.mean_b + c1) * (2 * s.cov + c2);
      const double den = (s.mean_a * s.mean_a + s.mean_b * s.mean_b + c1) *
                         (s.var_a + s.var_b + c2);
      total += num / den;
      ++count;
    }
  }
  return count ? total / double(count) : 1.0;
}

// Binary PPM (P6, maxval 255) with 1/2.2 gamma applied on write.
inline void write_ppm(const std::string& path, const ImageBuffer& img) {
  atomic_write(path, [&](std::ostream& os) {
    os << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> row(size_t(img.width) * 3);
    for (uint32_t y = 0; y < img.height; ++y) {
      for (uint32_t x = 0; x < img.width; ++x) {
        const double* p = img.pixel(x, y);
        for (int c = 0; c < 3; ++c) {
          const double v = std::pow(clamp01(p[c]), 1.0 / 2.2);
          row[size_t(x) * 3 + c] =
              (unsigned char)std::lround(255.0 * v);
        }
      }
      os.write(reinterpret_cast<const char*>(row.data()),
               std::streamsize(row.size()));
    }
  });
}

inline ImageBuffer read_ppm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_ppm: cannot open " + path);
  std::string magic;
  uint32_t w = 0, h = 0, maxv = 0;
  is >> magic >> w >> h >> maxv;
  if (magic != "P6" || maxv != 255)
    throw std::runtime_error("read_ppm: unsupported PPM variant");
  is.get();  // single whitespace after the header
  ImageBuffer img(w, h);
  std::vector<unsigned char> data(size_t(w) * h * 3);
  is.read(reinterpret_cast<char*>(data.data()), std::streamsize(data.size()));
  if (!is) throw std::runtime_error("read_ppm: truncated pixel data");
  for (size_t i = 0; i < data.size(); ++i)
    img.rgb[i] = std::pow(double(data[i]) / 255.0, 2.2);
  return img;
}

}  // namespace asdr
