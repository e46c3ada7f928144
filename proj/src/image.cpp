#include "wmseg/image.hpp"

#include <algorithm>
#include <string>

#include "wmseg/error.hpp"

namespace wmseg {

Raster::Raster(int h, int w, double fill)
    : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {
  if (h < 0 || w < 0) throw ParamError("negative raster dimensions");
}

ImageBuffer::ImageBuffer(int h, int w, double fill)
    : height(h), width(w), data(static_cast<std::size_t>(channels) * h * w, fill) {
  if (h < 0 || w < 0) throw ParamError("negative image dimensions");
}

Raster ImageBuffer::channel(int c) const {
  Raster r(height, width);
  std::copy(plane(c), plane(c) + plane_size(), r.data.begin());
  return r;
}

void ImageBuffer::set_channel(int c, const Raster& r) {
  if (r.height != height || r.width != width) throw DataError("channel dimension mismatch");
  std::copy(r.data.begin(), r.data.end(), plane(c));
}

void ImageBuffer::clamp01() {
  for (double& v : data) v = std::clamp(v, 0.0, 1.0);
}

ImageBuffer constant_image(int h, int w, double r, double g, double b) {
  ImageBuffer img(h, w);
  const double v[3] = {r, g, b};
  for (int c = 0; c < 3; ++c) std::fill(img.plane(c), img.plane(c) + img.plane_size(), v[c]);
  return img;
}

ImageBuffer from_gray(const Raster& gray) {
  ImageBuffer img(gray.height, gray.width);
  for (int c = 0; c < 3; ++c) img.set_channel(c, gray);
  return img;
}

MaskMap binarize(const MaskMap& m) {
  MaskMap out(m.height, m.width);
  for (std::size_t i = 0; i < m.size(); ++i) out.data[i] = m.data[i] > 0.5 ? 1.0 : 0.0;
  return out;
}

MaskMap complement(const MaskMap& m) {
  MaskMap out(m.height, m.width);
  for (std::size_t i = 0; i < m.size(); ++i) out.data[i] = m.data[i] > 0.5 ? 0.0 : 1.0;
  return out;
}

std::size_t popcount(const MaskMap& m) {
  return static_cast<std::size_t>(std::count_if(m.data.begin(), m.data.end(), [](double v) { return v > 0.5; }));
}

MaskMap rect_mask(int height, int width, int top, int left, int h, int w) {
  MaskMap m(height, width);
  const int i0 = std::max(top, 0), i1 = std::min(top + h, height);
  const int j0 = std::max(left, 0), j1 = std::min(left + w, width);
  for (int i = i0; i < i1; ++i)
    for (int j = j0; j < j1; ++j) m.at(i, j) = 1.0;
  return m;
}

namespace {
void dims_error(const char* what, int h0, int w0, int h1, int w1) {
  throw DataError(std::string(what) + ": dimension mismatch (" + std::to_string(h0) + "x" + std::to_string(w0) +
                  " vs " + std::to_string(h1) + "x" + std::to_string(w1) + ")");
}
}  // namespace

void require_same_dims(const ImageBuffer& a, const ImageBuffer& b, const char* what) {
  if (a.height != b.height || a.width != b.width) dims_error(what, a.height, a.width, b.height, b.width);
}
void require_same_dims(const ImageBuffer& a, const Raster& b, const char* what) {
  if (a.height != b.height || a.width != b.width) dims_error(what, a.height, a.width, b.height, b.width);
}
void require_same_dims(const Raster& a, const Raster& b, const char* what) {
  if (a.height != b.height || a.width != b.width) dims_error(what, a.height, a.width, b.height, b.width);
}

}  // namespace wmseg
