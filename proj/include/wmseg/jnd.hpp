#pragma once

#include <array>

#include "wmseg/image.hpp"

namespace wmseg {

struct JndParams {
  double gamma = 0.3;
  double epsilon = 1e-6;
  std::array<double, 3> alpha_rgb{1.0, 1.0, 2.0};
  void validate() const;
};

// Three channels (alpha_R H, alpha_G H, alpha_B H) in units of 8-bit pixel difference.
struct JndMap {
  Raster heatmap;  // H
  std::array<double, 3> alpha_rgb{1.0, 1.0, 2.0};
  int height() const { return heatmap.height; }
  int width() const { return heatmap.width; }
  double at(int c, int i, int j) const { return alpha_rgb[c] * heatmap.at(i, j); }
  ImageBuffer channels() const;
};

// Rec.601 luma on the [0,255] scale.
Raster luminance(const ImageBuffer& img);
Raster background_luminance(const Raster& lum);
double luminance_adaptation(double b, const JndParams& params);
Raster luminance_adaptation(const Raster& b, const JndParams& params);
// Sobel gradient magnitude.
Raster gradient_magnitude(const Raster& lum);
double contrast_masking_from_gradient(double c);
Raster contrast_masking(const Raster& lum);
double combine_masking(double la, double cm, double gamma);
Raster jnd_heatmap(const ImageBuffer& img, const JndParams& params);
JndMap jnd_map(const ImageBuffer& img, const JndParams& params);

}  // namespace wmseg
