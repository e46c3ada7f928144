#include "wmseg/jnd.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wmseg/error.hpp"
#include "wmseg/filter.hpp"

namespace wmseg {

void JndParams::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ParamError("jnd gamma must be in [0,1]");
  if (!(epsilon > 0.0)) throw ParamError("jnd epsilon must be > 0");
  for (double a : alpha_rgb)
    if (!(a > 0.0)) throw ParamError("jnd channel weights must be > 0");
}

ImageBuffer JndMap::channels() const {
  ImageBuffer out(height(), width());
  for (int c = 0; c < 3; ++c) {
    double* p = out.plane(c);
    for (std::size_t q = 0; q < heatmap.size(); ++q) p[q] = alpha_rgb[c] * heatmap.data[q];
  }
  return out;
}

Raster luminance(const ImageBuffer& img) {
  Raster out(img.height, img.width);
  const double *r = img.plane(0), *g = img.plane(1), *b = img.plane(2);
  for (std::size_t p = 0; p < out.size(); ++p) out.data[p] = 255.0 * (0.299 * r[p] + 0.587 * g[p] + 0.114 * b[p]);
  return out;
}

Raster background_luminance(const Raster& lum) {
  static const std::vector<double> k_lum = {
      1, 1, 1, 1, 1,
      1, 2, 2, 2, 1,
      1, 2, 0, 2, 1,
      1, 2, 2, 2, 1,
      1, 1, 1, 1, 1,
  };
  Raster b = correlate(lum, k_lum, 5, 5);
  for (double& v : b.data) v /= 32.0;
  return b;
}

double luminance_adaptation(double b, const JndParams& params) {
  if (b <= 127.0) return 17.0 * (1.0 - std::sqrt(b / 127.0 + params.epsilon)) + 3.0;
  return 3.0 / 128.0 * (b - 127.0) + 3.0;
}

Raster luminance_adaptation(const Raster& b, const JndParams& params) {
  Raster out(b.height, b.width);
  for (std::size_t p = 0; p < b.size(); ++p) out.data[p] = luminance_adaptation(b.data[p], params);
  return out;
}

Raster gradient_magnitude(const Raster& lum) {
  static const std::vector<double> kx = {-1, 0, 1, -2, 0, 2, -1, 0, 1};
  static const std::vector<double> ky = {-1, -2, -1, 0, 0, 0, 1, 2, 1};
  const Raster gx = correlate(lum, kx, 3, 3), gy = correlate(lum, ky, 3, 3);
  Raster c(lum.height, lum.width);
  for (std::size_t p = 0; p < c.size(); ++p) c.data[p] = std::sqrt(gx.data[p] * gx.data[p] + gy.data[p] * gy.data[p]);
  return c;
}

double contrast_masking_from_gradient(double c) {
  if (c <= 0.0) return 0.0;
  return 16.0 * std::pow(c, 2.4) / (c * c + 26.0 * 26.0);
}

Raster contrast_masking(const Raster& lum) {
  Raster c = gradient_magnitude(lum);
  for (double& v : c.data) v = contrast_masking_from_gradient(v);
  return c;
}

double combine_masking(double la, double cm, double gamma) { return la + cm - gamma * std::min(la, cm); }

Raster jnd_heatmap(const ImageBuffer& img, const JndParams& params) {
  params.validate();
  const Raster lum = luminance(img);
  const Raster la = luminance_adaptation(background_luminance(lum), params);
  Raster h = contrast_masking(lum);
  for (std::size_t p = 0; p < h.size(); ++p) h.data[p] = combine_masking(la.data[p], h.data[p], params.gamma);
  return h;
}

JndMap jnd_map(const ImageBuffer& img, const JndParams& params) {
  JndMap m;
  m.heatmap = jnd_heatmap(img, params);
  m.alpha_rgb = params.alpha_rgb;
  return m;
}

}  // namespace wmseg
