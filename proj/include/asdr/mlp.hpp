#pragma once
// Small fully-connected inference nets: the density head (encoded features ->
// sigma + geometry vector), the color head (geometry + direction encoding ->
// RGB), degree-3 spherical-harmonic direction encoding, FLOP accounting, and
// the on-disk weight format.
//
// Weight file layout ("ASDRMLP0", all little-endian):
//   char[8] magic, u32 layer_count, then per layer: u32 rows, u32 cols,
//   u32 activation (0 none, 1 relu), rows*cols f32 weights row-major,
//   rows f32 biases.

#include <algorithm>
#include <cstdint>

#include "core.hpp"
#include "grid.hpp"

namespace asdr {

inline double softplus(double x) {
  // Stable both directions; exact identity limits for |x| large.
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

enum class Activation : uint32_t { none = 0, relu = 1 };

struct MLPLayer {
  uint32_t rows = 0;  // output width
  uint32_t cols = 0;  // input width
  std::vector<float> w;  // rows x cols, row-major
  std::vector<float> b;  // rows
  Activation act = Activation::none;
};

struct MLPParams {
  std::vector<MLPLayer> layers;

  uint32_t input_dim() const { return layers.empty() ? 0 : layers.front().cols; }
  uint32_t output_dim() const { return layers.empty() ? 0 : layers.back().rows; }

  // Affine chain y = act(Wx + b) per layer. Throws on width mismatch.
  std::vector<double> forward(const std::vector<double>& in) const {
    if (in.size() != input_dim())
      throw std::invalid_argument("mlp: input width mismatch");
    std::vector<double> x = in, y;
    for (const MLPLayer& l : layers) {
      y.assign(l.rows, 0.0);
      for (uint32_t r = 0; r < l.rows; ++r) {
        double acc = l.b[r];
        const float* wr = &l.w[size_t(r) * l.cols];
        for (uint32_t c = 0; c < l.cols; ++c) acc += double(wr[c]) * x[c];
        y[r] = l.act == Activation::relu && acc < 0.0 ? 0.0 : acc;
      }
      x.swap(y);
    }
    return x;
  }

  // dims = {in, hidden..., out}; hidden layers optionally relu, output linear.
  static MLPParams seeded(const std::vector<uint32_t>& dims, bool relu_hidden,
                          uint64_t seed) {
    if (dims.size() < 2) throw std::invalid_argument("mlp: need >= 2 dims");
    MLPParams net;
    std::mt19937_64 gen(seed);
    for (size_t i = 0; i + 1 < dims.size(); ++i) {
      MLPLayer l;
      l.cols = dims[i];
      l.rows = dims[i + 1];
      l.act = relu_hidden && i + 2 < dims.size() ? Activation::relu
                                                 : Activation::none;
      const double bound = std::sqrt(6.0 / double(l.rows + l.cols));
      l.w.resize(size_t(l.rows) * l.cols);
      for (float& v : l.w) v = float(uniform_in(gen, -bound, bound));
      l.b.assign(l.rows, 0.0f);
      net.layers.push_back(std::move(l));
    }
    return net;
  }
};

constexpr uint32_t kGeoFeatures = 15;

struct DensityOut {
  double sigma = 0.0;
  std::array<double, kGeoFeatures> geo{};
};

// Head 1: encoded features -> (sigma, geometry vector). The net must end in a
// 16-wide layer: channel 0 passes through softplus, channels 1..15 are the
// geometry features handed to the color head.
inline DensityOut density_head(const MLPParams& net, const double* feat,
                               size_t n) {
  if (net.output_dim() != 1 + kGeoFeatures)
    throw std::invalid_argument("density head: net must output 16 values");
  const std::vector<double> out = net.forward(std::vector<double>(feat, feat + n));
  DensityOut d;
  d.sigma = softplus(out[0]);
  for (uint32_t j = 0; j < kGeoFeatures; ++j) d.geo[j] = out[1 + j];
  return d;
}

// Degree-3 real spherical harmonics of a unit direction, 16 values.
inline std::array<double, 16> sh_encoding(const Vec3& d) {
  const double x = d.x, y = d.y, z = d.z;
  const double xx = x * x, yy = y * y, zz = z * z;
  std::array<double, 16> e;
  e[0] = 0.28209479177387814;
  e[1] = -0.48860251190291987 * y;
  e[2] = 0.48860251190291987 * z;
  e[3] = -0.48860251190291987 * x;
  e[4] = 1.0925484305920792 * x * y;
  e[5] = -1.0925484305920792 * y * z;
  e[6] = 0.31539156525252005 * (3.0 * zz - 1.0);
  e[7] = -1.0925484305920792 * x * z;
  e[8] = 0.5462742152960396 * (xx - yy);
  e[9] = -0.5900435899266435 * y * (3.0 * xx - yy);
  e[10] = 2.890611442640554 * x * y * z;
  e[11] = -0.4570457994644658 * y * (5.0 * zz - 1.0);
  e[12] = 0.3731763325901154 * z * (5.0 * zz - 3.0);
  e[13] = -0.4570457994644658 * x * (5.0 * zz - 1.0);
  e[14] = 1.445305721320277 * z * (xx - yy);
  e[15] = -0.5900435899266435 * x * (xx - 3.0 * yy);
  return e;
}

// Head 2: (geometry features, direction encoding) -> RGB in [0,1]^3 via a
// final sigmoid.
inline Vec3 color_head(const MLPParams& net, const double* geo,
                       const double* dir_enc) {
  if (net.output_dim() != 3)
    throw std::invalid_argument("color head: net must output 3 values");
  std::vector<double> in(net.input_dim());
  if (in.size() != kGeoFeatures + 16)
    throw std::invalid_argument("color head: net must take 31 inputs");
  for (uint32_t j = 0; j < kGeoFeatures; ++j) in[j] = geo[j];
  for (uint32_t j = 0; j < 16; ++j) in[kGeoFeatures + j] = dir_enc[j];
  const std::vector<double> out = net.forward(in);
  return {sigmoid(out[0]), sigmoid(out[1]), sigmoid(out[2])};
}

struct MLPPair {
  MLPParams density;
  MLPParams color;
};

struct FlopsBreakdown {
  uint64_t density_flops = 0;
  uint64_t color_flops = 0;
  double color_share = 0.0;  // color / (color + density)
};

inline uint64_t mlp_flops(const MLPParams& net) {
  uint64_t f = 0;
  for (const MLPLayer& l : net.layers) f += 2ull * l.rows * l.cols;
  return f;
}

inline FlopsBreakdown flops_breakdown(const MLPPair& pair) {
  FlopsBreakdown fb;
  fb.density_flops = mlp_flops(pair.density);
  fb.color_flops = mlp_flops(pair.color);
  fb.color_share =
      double(fb.color_flops) / double(fb.color_flops + fb.density_flops);
  return fb;
}

// Presets:
//   "default"     density (L*F)->64->16, color 31->64->64->64->64->3
//   "paper_split" same density, color hidden width 128 — puts ~91% of the
//                 FLOPs in the color head, the split the architecture's
//                 color-skip path is sized around
//   "passthrough" hand-set routing weights: sigma_raw = mean of the baked
//                 density channels, geo[0..2] = mean of the baked color
//                 channels, color = sigmoid(geo[0..2]); pairs with
//                 BakeEncoding::mlp_passthrough
inline MLPPair make_mlp_preset(const std::string& name, const GridConfig& grid,
                               uint64_t seed) {
  const uint32_t enc = grid.levels * grid.features;
  MLPPair p;
  if (name == "default") {
    p.density = MLPParams::seeded({enc, 64, 16}, true, seed);
    p.color = MLPParams::seeded({31, 64, 64, 64, 64, 3}, true, seed + 1);
    return p;
  }
  if (name == "paper_split") {
    p.density = MLPParams::seeded({enc, 64, 16}, true, seed);
    p.color = MLPParams::seeded({31, 128, 128, 128, 128, 3}, true, seed + 1);
    return p;
  }
  if (name == "passthrough") {
    if (grid.features < 4)
      throw std::invalid_argument("passthrough preset: needs features >= 4");
    MLPLayer d;
    d.rows = 16;
    d.cols = enc;
    d.act = Activation::none;
    d.w.assign(size_t(d.rows) * d.cols, 0.0f);
    d.b.assign(d.rows, 0.0f);
    const float inv_l = 1.0f / float(grid.levels);
    for (uint32_t l = 0; l < grid.levels; ++l) {
      d.w[0 * d.cols + l * grid.features + 0] = inv_l;            // sigma_raw
      for (uint32_t c = 0; c < 3; ++c)                            // geo[0..2]
        d.w[(1 + c) * d.cols + l * grid.features + 1 + c] = inv_l;
    }
    p.density.layers.push_back(std::move(d));

    MLPLayer c;
    c.rows = 3;
    c.cols = kGeoFeatures + 16;
    c.act = Activation::none;
    c.w.assign(size_t(c.rows) * c.cols, 0.0f);
    c.b.assign(c.rows, 0.0f);
    for (uint32_t ch = 0; ch < 3; ++ch) c.w[ch * c.cols + ch] = 1.0f;
    p.color.layers.push_back(std::move(c));
    return p;
  }
  throw std::invalid_argument("unknown mlp preset: " + name);
}

inline constexpr char kMlpMagic[8] = {'A', 'S', 'D', 'R', 'M', 'L', 'P', '0'};

inline void dump_mlp(const MLPParams& net, const std::string& path) {
  atomic_write(path, [&](std::ostream& os) {
    write_bytes(os, kMlpMagic, 8);
    write_u32(os, uint32_t(net.layers.size()));
    for (const MLPLayer& l : net.layers) {
      write_u32(os, l.rows);
      write_u32(os, l.cols);
      write_u32(os, uint32_t(l.act));
      for (float v : l.w) write_f32(os, v);
      for (float v : l.b) write_f32(os, v);
    }
  });
}

inline MLPParams load_mlp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open weight file: " + path);
  char magic[8];
  read_bytes(is, magic, 8, "mlp magic");
  if (std::memcmp(magic, kMlpMagic, 8) != 0)
    throw std::runtime_error("not a weight file (bad magic): " + path);
  const uint32_t count = read_u32(is, "mlp layer count");
  if (count == 0 || count > 64)
    throw std::runtime_error("implausible layer count: " + path);
  MLPParams net;
  for (uint32_t i = 0; i < count; ++i) {
    MLPLayer l;
    l.rows = read_u32(is, "mlp rows");
    l.cols = read_u32(is, "mlp cols");
    const uint32_t act = read_u32(is, "mlp activation");
    if (l.rows == 0 || l.cols == 0 || l.rows > 65536 || l.cols > 65536 ||
        act > 1)
      throw std::runtime_error("corrupt layer header: " + path);
    l.act = Activation(act);
    l.w.resize(size_t(l.rows) * l.cols);
    for (float& v : l.w) v = read_f32(is, "mlp weights");
    l.b.resize(l.rows);
    for (float& v : l.b) v = read_f32(is, "mlp biases");
    if (i > 0 && l.cols != net.layers.back().rows)
      throw std::runtime_error("layer widths do not chain: " + path);
    net.layers.push_back(std::move(l));
  }
  return net;
}

}  // namespace asdr
