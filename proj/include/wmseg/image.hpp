#pragma once

#include <cstddef>
#include <vector>

namespace wmseg {

// Single-channel raster, row-major.
struct Raster {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Raster() = default;
  Raster(int h, int w, double fill = 0.0);

  std::size_t size() const { return data.size(); }
  double& at(int i, int j) { return data[static_cast<std::size_t>(i) * width + j]; }
  double at(int i, int j) const { return data[static_cast<std::size_t>(i) * width + j]; }
  bool same_dims(const Raster& o) const { return height == o.height && width == o.width; }
};

// Values in [0,1]; binarized at 0.5 when used as ground truth.
using MaskMap = Raster;

// Planar 3-channel image with samples in [0,1].
struct ImageBuffer {
  static constexpr int channels = 3;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  ImageBuffer() = default;
  ImageBuffer(int h, int w, double fill = 0.0);

  std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
  double* plane(int c) { return data.data() + c * plane_size(); }
  const double* plane(int c) const { return data.data() + c * plane_size(); }
  double& at(int c, int i, int j) { return data[c * plane_size() + static_cast<std::size_t>(i) * width + j]; }
  double at(int c, int i, int j) const { return data[c * plane_size() + static_cast<std::size_t>(i) * width + j]; }

  Raster channel(int c) const;
  void set_channel(int c, const Raster& r);
  void clamp01();
};

ImageBuffer constant_image(int h, int w, double r, double g, double b);
ImageBuffer from_gray(const Raster& gray);

// Pixels > 0.5 become 1, all others 0.
MaskMap binarize(const MaskMap& m);
MaskMap complement(const MaskMap& m);
std::size_t popcount(const MaskMap& m);

// Rectangle [top, top+h) x [left, left+w) set to 1, clipped to the raster.
MaskMap rect_mask(int height, int width, int top, int left, int h, int w);

void require_same_dims(const ImageBuffer& a, const ImageBuffer& b, const char* what);
void require_same_dims(const ImageBuffer& a, const Raster& b, const char* what);
void require_same_dims(const Raster& a, const Raster& b, const char* what);

}  // namespace wmseg
