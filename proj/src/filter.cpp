#include "wmseg/filter.hpp"

#include <algorithm>
#include <cmath>

#include "wmseg/error.hpp"

namespace wmseg {

namespace {
inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }
}  // namespace

Raster correlate(const Raster& src, const std::vector<double>& kernel, int kh, int kw) {
  if (kh % 2 == 0 || kw % 2 == 0 || static_cast<int>(kernel.size()) != kh * kw)
    throw ParamError("correlate: kernel must be odd-sized");
  const int rh = kh / 2, rw = kw / 2;
  Raster out(src.height, src.width);
  for (int i = 0; i < src.height; ++i) {
    for (int j = 0; j < src.width; ++j) {
      double acc = 0.0;
      for (int a = 0; a < kh; ++a) {
        const int y = clampi(i + a - rh, 0, src.height - 1);
        for (int b = 0; b < kw; ++b) {
          const double w = kernel[a * kw + b];
          if (w == 0.0) continue;
          acc += w * src.at(y, clampi(j + b - rw, 0, src.width - 1));
        }
      }
      out.at(i, j) = acc;
    }
  }
  return out;
}

Raster separable(const Raster& src, const std::vector<double>& k1d) {
  const int n = static_cast<int>(k1d.size());
  if (n % 2 == 0) throw ParamError("separable: kernel length must be odd");
  const int r = n / 2;
  Raster tmp(src.height, src.width), out(src.height, src.width);
  for (int i = 0; i < src.height; ++i)
    for (int j = 0; j < src.width; ++j) {
      double acc = 0.0;
      for (int b = 0; b < n; ++b) acc += k1d[b] * src.at(i, clampi(j + b - r, 0, src.width - 1));
      tmp.at(i, j) = acc;
    }
  for (int i = 0; i < src.height; ++i)
    for (int j = 0; j < src.width; ++j) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a) acc += k1d[a] * tmp.at(clampi(i + a - r, 0, src.height - 1), j);
      out.at(i, j) = acc;
    }
  return out;
}

namespace {
// Sliding-window sum along one line with clamped indices.
void line_box(const double* in, std::ptrdiff_t stride, int n, int win, double* out, std::ptrdiff_t ostride) {
  const int lo = -(win / 2);
  double s = 0.0;
  for (int t = lo; t < lo + win; ++t) s += in[clampi(t, 0, n - 1) * stride];
  const double inv = 1.0 / win;
  for (int i = 0; i < n; ++i) {
    out[i * ostride] = s * inv;
    s += in[clampi(i + lo + win, 0, n - 1) * stride] - in[clampi(i + lo, 0, n - 1) * stride];
  }
}
}  // namespace

Raster box_mean(const Raster& src, int win) {
  if (win < 1) throw ParamError("box_mean: window must be >= 1");
  Raster tmp(src.height, src.width), out(src.height, src.width);
  if (src.size() == 0) return out;
  for (int i = 0; i < src.height; ++i) line_box(&src.data[static_cast<std::size_t>(i) * src.width], 1, src.width, win, &tmp.data[static_cast<std::size_t>(i) * src.width], 1);
  for (int j = 0; j < src.width; ++j) line_box(&tmp.data[j], src.width, src.height, win, &out.data[j], src.width);
  return out;
}

Raster neighbour_mean8(const Raster& src) {
  static const std::vector<double> k = {1, 1, 1, 1, 0, 1, 1, 1, 1};
  Raster out = correlate(src, k, 3, 3);
  for (double& v : out.data) v /= 8.0;
  return out;
}

double sample_bilinear(const Raster& src, double y, double x, double fill) {
  const double fy = std::floor(y), fx = std::floor(x);
  const int y0 = static_cast<int>(fy), x0 = static_cast<int>(fx);
  const double dy = y - fy, dx = x - fx;
  auto tap = [&](int yy, int xx) {
    return (yy < 0 || xx < 0 || yy >= src.height || xx >= src.width) ? fill : src.at(yy, xx);
  };
  const double top = tap(y0, x0) + dx * (tap(y0, x0 + 1) - tap(y0, x0));
  const double bot = tap(y0 + 1, x0) + dx * (tap(y0 + 1, x0 + 1) - tap(y0 + 1, x0));
  return top + dy * (bot - top);
}

namespace {
struct Taps {
  std::vector<int> i0, i1;
  std::vector<double> f;
};

Taps bilinear_taps(int in_n, int out_n) {
  Taps t;
  t.i0.resize(out_n);
  t.i1.resize(out_n);
  t.f.resize(out_n);
  const double scale = static_cast<double>(in_n) / out_n;
  for (int o = 0; o < out_n; ++o) {
    double s = (o + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(in_n - 1));
    const int a = static_cast<int>(std::floor(s));
    t.i0[o] = a;
    t.i1[o] = std::min(a + 1, in_n - 1);
    t.f[o] = s - a;
  }
  return t;
}
}  // namespace

Raster resize_bilinear(const Raster& src, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) throw ParamError("resize: output dimensions must be positive");
  if (src.height < 1 || src.width < 1) throw DataError("resize: empty input");
  if (out_h == src.height && out_w == src.width) return src;
  const Taps ty = bilinear_taps(src.height, out_h), tx = bilinear_taps(src.width, out_w);
  Raster out(out_h, out_w);
  for (int i = 0; i < out_h; ++i) {
    const double fy = ty.f[i];
    for (int j = 0; j < out_w; ++j) {
      const double fx = tx.f[j];
      const double a = src.at(ty.i0[i], tx.i0[j]), b = src.at(ty.i0[i], tx.i1[j]);
      const double c = src.at(ty.i1[i], tx.i0[j]), d = src.at(ty.i1[i], tx.i1[j]);
      const double top = a + fx * (b - a), bot = c + fx * (d - c);
      out.at(i, j) = top + fy * (bot - top);
    }
  }
  return out;
}

ImageBuffer resize_bilinear(const ImageBuffer& src, int out_h, int out_w) {
  ImageBuffer out(out_h, out_w);
  for (int c = 0; c < 3; ++c) out.set_channel(c, resize_bilinear(src.channel(c), out_h, out_w));
  return out;
}

namespace {
// Row-stochastic weight matrix for area averaging along one axis (in_n >= out_n).
std::vector<std::vector<std::pair<int, double>>> area_weights(int in_n, int out_n) {
  std::vector<std::vector<std::pair<int, double>>> w(out_n);
  const double scale = static_cast<double>(in_n) / out_n;
  for (int o = 0; o < out_n; ++o) {
    const double a = o * scale, b = (o + 1) * scale;
    for (int p = static_cast<int>(std::floor(a)); p < std::min(in_n, static_cast<int>(std::ceil(b))); ++p) {
      const double cover = std::min(b, p + 1.0) - std::max(a, static_cast<double>(p));
      if (cover > 0) w[o].emplace_back(p, cover / scale);
    }
  }
  return w;
}
}  // namespace

Raster resize_area(const Raster& src, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) throw ParamError("resize: output dimensions must be positive");
  Raster cur = src;
  if (out_w < cur.width) {
    const auto w = area_weights(cur.width, out_w);
    Raster t(cur.height, out_w);
    for (int i = 0; i < cur.height; ++i)
      for (int j = 0; j < out_w; ++j) {
        double acc = 0.0;
        for (auto [p, wt] : w[j]) acc += wt * cur.at(i, p);
        t.at(i, j) = acc;
      }
    cur = std::move(t);
  }
  if (out_h < cur.height) {
    const auto w = area_weights(cur.height, out_h);
    Raster t(out_h, cur.width);
    for (int i = 0; i < out_h; ++i)
      for (int j = 0; j < cur.width; ++j) {
        double acc = 0.0;
        for (auto [p, wt] : w[i]) acc += wt * cur.at(p, j);
        t.at(i, j) = acc;
      }
    cur = std::move(t);
  }
  return resize_bilinear(cur, out_h, out_w);
}

ImageBuffer resize_area(const ImageBuffer& src, int out_h, int out_w) {
  ImageBuffer out(out_h, out_w);
  for (int c = 0; c < 3; ++c) out.set_channel(c, resize_area(src.channel(c), out_h, out_w));
  return out;
}

Raster warp(const Raster& src, int out_h, int out_w, const InverseMap& inv, double fill) {
  Raster out(out_h, out_w);
  for (int i = 0; i < out_h; ++i)
    for (int j = 0; j < out_w; ++j) {
      double y, x;
      inv(i, j, y, x);
      out.at(i, j) = sample_bilinear(src, y, x, fill);
    }
  return out;
}

}  // namespace wmseg
