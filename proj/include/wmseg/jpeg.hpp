#pragma once

#include <array>

#include "wmseg/image.hpp"

namespace wmseg {

// Annex K base table scaled by the libjpeg quality law; entries in [1,255], row-major 8x8.
std::array<int, 64> jpeg_quant_table(bool chroma, int quality);

// Baseline JPEG round trip without entropy coding: YCbCr, 4:2:0, 8x8 DCT quantization.
ImageBuffer jpeg_roundtrip(const ImageBuffer& img, int quality);

}  // namespace wmseg
