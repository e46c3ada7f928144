#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wmseg/image.hpp"

namespace wmseg {

// Smooth synthetic scene: two-color gradient, soft ellipses, band-limited texture, sensor noise.
ImageBuffer synthetic_image(int size, std::uint64_t seed);
std::vector<ImageBuffer> synthetic_corpus(int count, int size, std::uint64_t seed);

// Raster files (.png, .ppm, .pgm, .pnm) in a directory, sorted by name.
std::vector<std::string> list_images(const std::string& dir);
// Every image resized (area averaging when shrinking) to size x size.
std::vector<ImageBuffer> load_corpus(const std::string& dir, int size);
// Random square crops (at least size pixels when the source allows), resized to size x size and
// flipped horizontally with probability 0.5. Sources are used round-robin.
std::vector<ImageBuffer> photo_crops(const std::vector<ImageBuffer>& sources, int count, int size, std::uint64_t seed);

Raster gaussian_filter(const Raster& src, double sigma);

}  // namespace wmseg
