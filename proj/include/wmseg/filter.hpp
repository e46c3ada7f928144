#pragma once

#include <functional>
#include <vector>

#include "wmseg/image.hpp"

namespace wmseg {

// 2-D correlation with an odd-sized kernel, edge-replicated borders.
Raster correlate(const Raster& src, const std::vector<double>& kernel, int kh, int kw);

// Separable correlation with an odd-length 1-D kernel along both axes, edge-replicated.
Raster separable(const Raster& src, const std::vector<double>& k1d);

// Mean over a win x win window covering rows i - win/2 .. i - win/2 + win - 1 (same for columns),
// edge-replicated. For odd win the window is centered.
Raster box_mean(const Raster& src, int win);

// Mean of the 8 neighbours of each pixel, edge-replicated.
Raster neighbour_mean8(const Raster& src);

// Resampling with pixel centers at integer coordinates.
// Bilinear sample; taps outside the raster take the fill value.
double sample_bilinear(const Raster& src, double y, double x, double fill);

// Half-pixel-center bilinear resize with edge clamping.
Raster resize_bilinear(const Raster& src, int out_h, int out_w);
ImageBuffer resize_bilinear(const ImageBuffer& src, int out_h, int out_w);

// Area-averaging resize for downscaling (exact pixel-coverage weights); falls back to bilinear
// along any axis that is being enlarged.
Raster resize_area(const Raster& src, int out_h, int out_w);
ImageBuffer resize_area(const ImageBuffer& src, int out_h, int out_w);

// Maps output pixel (i, j) to source coordinates (y, x).
using InverseMap = std::function<void(double i, double j, double& y, double& x)>;

Raster warp(const Raster& src, int out_h, int out_w, const InverseMap& inv, double fill);

}  // namespace wmseg
