#include "wmseg/jpeg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "wmseg/error.hpp"
#include "wmseg/raster_io.hpp"

namespace wmseg {

namespace {

constexpr std::array<int, 64> kLumaBase = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99,
};

constexpr std::array<int, 64> kChromaBase = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
};

struct DctBasis {
  double c[8][8];  // c[u][x] = a(u) cos((2x+1) u pi / 16)
  DctBasis() {
    for (int u = 0; u < 8; ++u)
      for (int x = 0; x < 8; ++x)
        c[u][x] = (u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0)) *
                  std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
  }
};

const DctBasis& basis() {
  static const DctBasis b;
  return b;
}

// Quantize-dequantize one plane of 8-bit samples in place.
void code_plane(Raster& plane, const std::array<int, 64>& q) {
  const auto& c = basis().c;
  const int h = plane.height, w = plane.width;
  const int bh = (h + 7) / 8, bw = (w + 7) / 8;
  double blk[8][8], tmp[8][8], coef[8][8];
  for (int by = 0; by < bh; ++by)
    for (int bx = 0; bx < bw; ++bx) {
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          blk[y][x] = plane.at(std::min(by * 8 + y, h - 1), std::min(bx * 8 + x, w - 1)) - 128.0;
      for (int u = 0; u < 8; ++u)
        for (int x = 0; x < 8; ++x) {
          double s = 0.0;
          for (int y = 0; y < 8; ++y) s += c[u][y] * blk[y][x];
          tmp[u][x] = s;
        }
      for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
          double s = 0.0;
          for (int x = 0; x < 8; ++x) s += c[v][x] * tmp[u][x];
          const double step = q[u * 8 + v];
          coef[u][v] = std::round(s / step) * step;
        }
      for (int y = 0; y < 8; ++y)
        for (int v = 0; v < 8; ++v) {
          double s = 0.0;
          for (int u = 0; u < 8; ++u) s += c[u][y] * coef[u][v];
          tmp[y][v] = s;
        }
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
          const int i = by * 8 + y, j = bx * 8 + x;
          if (i >= h || j >= w) continue;
          double s = 0.0;
          for (int v = 0; v < 8; ++v) s += c[v][x] * tmp[y][v];
          plane.at(i, j) = std::clamp(std::round(s + 128.0), 0.0, 255.0);
        }
    }
}

double round8(double v) { return std::clamp(std::round(v), 0.0, 255.0); }

}  // namespace

std::array<int, 64> jpeg_quant_table(bool chroma, int quality) {
  if (quality < 1 || quality > 100) throw ParamError("JPEG quality must be in [1,100]");
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  const auto& base = chroma ? kChromaBase : kLumaBase;
  std::array<int, 64> t{};
  for (int i = 0; i < 64; ++i) t[i] = std::clamp((base[i] * scale + 50) / 100, 1, 255);
  return t;
}

ImageBuffer jpeg_roundtrip(const ImageBuffer& img, int quality) {
  const auto ql = jpeg_quant_table(false, quality), qc = jpeg_quant_table(true, quality);
  const int h = img.height, w = img.width;
  if (h < 1 || w < 1) throw DataError("jpeg: empty image");
  const int ch = (h + 1) / 2, cw = (w + 1) / 2;

  Raster y(h, w), cb_full(h, w), cr_full(h, w);
  for (std::size_t p = 0; p < img.plane_size(); ++p) {
    const double r = quantize8(img.plane(0)[p]), g = quantize8(img.plane(1)[p]), b = quantize8(img.plane(2)[p]);
    y.data[p] = round8(0.299 * r + 0.587 * g + 0.114 * b);
    cb_full.data[p] = -0.168736 * r - 0.331264 * g + 0.5 * b + 128.0;
    cr_full.data[p] = 0.5 * r - 0.418688 * g - 0.081312 * b + 128.0;
  }
  Raster cb(ch, cw), cr(ch, cw);
  for (int i = 0; i < ch; ++i)
    for (int j = 0; j < cw; ++j) {
      double sb = 0.0, sr = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const int yy = std::min(2 * i + a, h - 1), xx = std::min(2 * j + b, w - 1);
          sb += cb_full.at(yy, xx);
          sr += cr_full.at(yy, xx);
        }
      cb.at(i, j) = round8(sb / 4.0);
      cr.at(i, j) = round8(sr / 4.0);
    }

  code_plane(y, ql);
  code_plane(cb, qc);
  code_plane(cr, qc);

  // Triangle-filter chroma upsampling (chroma sample k centered between luma 2k and 2k+1).
  auto up = [&](const Raster& c, int i, int j) {
    const double sy = std::clamp((i + 0.5) / 2.0 - 0.5, 0.0, ch - 1.0);
    const double sx = std::clamp((j + 0.5) / 2.0 - 0.5, 0.0, cw - 1.0);
    const int y0 = static_cast<int>(sy), x0 = static_cast<int>(sx);
    const int y1 = std::min(y0 + 1, ch - 1), x1 = std::min(x0 + 1, cw - 1);
    const double fy = sy - y0, fx = sx - x0;
    const double top = c.at(y0, x0) + fx * (c.at(y0, x1) - c.at(y0, x0));
    const double bot = c.at(y1, x0) + fx * (c.at(y1, x1) - c.at(y1, x0));
    return top + fy * (bot - top);
  };

  ImageBuffer out(h, w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      const double yy = y.at(i, j), cbv = up(cb, i, j) - 128.0, crv = up(cr, i, j) - 128.0;
      out.at(0, i, j) = round8(yy + 1.402 * crv) / 255.0;
      out.at(1, i, j) = round8(yy - 0.344136 * cbv - 0.714136 * crv) / 255.0;
      out.at(2, i, j) = round8(yy + 1.772 * cbv) / 255.0;
    }
  return out;
}

}  // namespace wmseg
