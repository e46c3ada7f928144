#pragma once

#include <string>

#include "wmseg/image.hpp"

namespace wmseg {

// PNG and binary PNM (P5/P6), 8 bits per sample. Grayscale inputs are replicated to 3 channels.
ImageBuffer load_image(const std::string& path);
// Format chosen by extension: .png, .ppm, .pgm (Rec.601 luma), .pnm.
void save_image(const ImageBuffer& img, const std::string& path);

// Single-channel load; color inputs are reduced to Rec.601 luma.
Raster load_gray(const std::string& path);
// Writes a single-channel raster scaled by 255 to .png or .pgm.
void save_gray(const Raster& r, const std::string& path);
// Writes raw 8-bit codes (no scaling) to .png or .pgm.
void save_codes(const Raster& codes, const std::string& path);

MaskMap load_mask(const std::string& path);
void save_mask(const MaskMap& m, const std::string& path);

// round(s*255) half away from zero, clamped to [0,255].
unsigned char quantize8(double s);

}  // namespace wmseg
