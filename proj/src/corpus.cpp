#include "wmseg/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "wmseg/augment.hpp"
#include "wmseg/error.hpp"
#include "wmseg/filter.hpp"
#include "wmseg/raster_io.hpp"
#include "wmseg/rng.hpp"

namespace wmseg {

Raster gaussian_filter(const Raster& src, double sigma) {
  const int r = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<double> g(2 * r + 1);
  double s = 0.0;
  for (int i = -r; i <= r; ++i) s += g[i + r] = std::exp(-i * i / (2.0 * sigma * sigma));
  for (double& v : g) v /= s;
  return separable(src, g);
}

ImageBuffer synthetic_image(int size, std::uint64_t seed) {
  CounterRng rng(seed, 0x73796e74);
  const int n = size;
  ImageBuffer img(n, n);
  double c0[3], c1[3];
  for (double& v : c0) v = rng.uniform(0.1, 0.9);
  for (double& v : c1) v = rng.uniform(0.1, 0.9);
  const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double ca = std::cos(ang), sa = std::sin(ang);
  double tmin = 1e300, tmax = -1e300;
  for (int i = 0; i < n; i += n - 1)
    for (int j = 0; j < n; j += n - 1) {
      const double t = ca * j / n + sa * i / n;
      tmin = std::min(tmin, t);
      tmax = std::max(tmax, t);
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double t = (ca * j / n + sa * i / n - tmin) / (tmax - tmin);
      for (int c = 0; c < 3; ++c) img.at(c, i, j) = c0[c] + (c1[c] - c0[c]) * t;
    }
  const int blobs = static_cast<int>(rng.uniform_int(3, 8));
  for (int b = 0; b < blobs; ++b) {
    const double cx = rng.uniform(), cy = rng.uniform(), rx = rng.uniform(0.05, 0.3), ry = rng.uniform(0.05, 0.3);
    double col[3];
    for (double& v : col) v = rng.uniform();
    Raster m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double u = (static_cast<double>(j) / n - cx) / rx, v = (static_cast<double>(i) / n - cy) / ry;
        m.at(i, j) = u * u + v * v < 1.0 ? 1.0 : 0.0;
      }
    m = gaussian_filter(m, rng.uniform(0.5, 3.0));
    for (int c = 0; c < 3; ++c)
      for (std::size_t p = 0; p < m.size(); ++p) img.plane(c)[p] = img.plane(c)[p] * (1 - m.data[p]) + col[c] * m.data[p];
  }
  Raster tex(n, n);
  for (double& v : tex.data) v = rng.normal();
  tex = gaussian_filter(tex, rng.uniform(1.0, 4.0));
  double mean = 0.0, var = 0.0;
  for (double v : tex.data) mean += v;
  mean /= tex.size();
  for (double v : tex.data) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / tex.size());
  const double amp = rng.uniform(0.0, 0.05);
  for (int c = 0; c < 3; ++c)
    for (std::size_t p = 0; p < tex.size(); ++p) img.plane(c)[p] += amp * tex.data[p] / sd;
  for (double& v : img.data) v += rng.normal() * 1.5 / 255.0;
  img.clamp01();
  return img;
}

std::vector<ImageBuffer> synthetic_corpus(int count, int size, std::uint64_t seed) {
  std::vector<ImageBuffer> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) out.push_back(synthetic_image(size, mix64(seed) + k));
  return out;
}

std::vector<std::string> list_images(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<ImageBuffer> load_corpus(const std::string& dir, int size) {
  std::vector<ImageBuffer> out;
  for (const auto& f : list_images(dir)) out.push_back(resize_area(load_image(f), size, size));
  if (out.empty()) throw DataError("no images in corpus directory: " + dir);
  return out;
}

std::vector<ImageBuffer> photo_crops(const std::vector<ImageBuffer>& sources, int count, int size, std::uint64_t seed) {
  if (sources.empty()) throw DataError("photo_crops: no source images");
  CounterRng rng(seed, 0x63726f70);
  std::vector<ImageBuffer> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const ImageBuffer& src = sources[k % sources.size()];
    const int m = std::min(src.height, src.width);
    int s = static_cast<int>(rng.uniform_int(m / 2, m));
    s = m >= size ? std::max(s, size) : m;
    const int y = static_cast<int>(rng.uniform_int(0, src.height - s));
    const int x = static_cast<int>(rng.uniform_int(0, src.width - s));
    ImageBuffer crop(s, s);
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) crop.at(c, i, j) = src.at(c, y + i, x + j);
    ImageBuffer r = resize_area(crop, size, size);
    if (rng.bernoulli(0.5)) r = hflip(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace wmseg
