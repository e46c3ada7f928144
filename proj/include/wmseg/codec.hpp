#pragma once

#include <string>
#include <vector>

#include "wmseg/image.hpp"
#include "wmseg/jnd.hpp"
#include "wmseg/key.hpp"
#include "wmseg/message.hpp"

namespace wmseg {

// Amplitude shaping of the carrier sum. The per-pixel gain is
// min(gain * knee / (H + knee), 1 / carrier_sum_bound) and the result is clamped to [-1,1].
struct CarrierShaping {
  double sync_weight = 4.0;
  double gain = 0.18;
  double knee = 10.0;
  void validate() const;
};

struct EmbedConfig {
  double alpha_jnd = 2.0;
  WatermarkKey key;
  JndParams jnd_params;
  CarrierShaping shaping;
  void validate() const;
};

struct ExtractConfig {
  WatermarkKey key;
  int window = 16;       // correlation window W
  int norm_window = 24;  // residual-energy window
  double slope = 8.0;    // logistic slope lambda
  double det_bias = 0.25;
  double knee = 10.0;
  JndParams jnd_params;
  // Processing size; 0 means extract at native resolution.
  int proc_h = 0;
  int proc_w = 0;
  void validate() const;
};

struct ExtractorOutput {
  MaskMap det;             // y_det
  std::vector<Raster> dec;  // y_dec, one raster per bit
  int height() const { return det.height; }
  int width() const { return det.width; }
  int n_bits() const { return static_cast<int>(dec.size()); }
};

// Normalized carrier sum (w0 c_0 + sum_k s_k c_k) / sqrt(w0^2 + n_bits) on an h x w grid.
Raster carrier_sum(const CarrierBank& bank, const Message& msg, double sync_weight, int h, int w);
// Largest possible |carrier_sum| for the given weight and length.
double carrier_sum_bound(double sync_weight, int n_bits);

// Watermark signal in [-1,1], identical across channels.
Raster make_delta(const ImageBuffer& img, const Message& msg, const EmbedConfig& cfg);

ImageBuffer apply_delta(const ImageBuffer& img, const Raster& delta, const MaskMap& mask, const EmbedConfig& cfg);
ImageBuffer embed(const ImageBuffer& img, const Message& msg, const MaskMap& mask, const EmbedConfig& cfg);
// Computes the signal at proc_h x proc_w and upsamples it bilinearly to the native size.
ImageBuffer embed_highres(const ImageBuffer& img, const Message& msg, const MaskMap& mask, const EmbedConfig& cfg,
                          int proc_h, int proc_w);
// The upsampled signal used by embed_highres.
Raster highres_delta(const ImageBuffer& img, const Message& msg, const EmbedConfig& cfg, int proc_h, int proc_w);

// Raw per-pixel statistics rho_k, k = 0..n_bits, before the logistic link.
std::vector<Raster> correlation_statistics(const ImageBuffer& img, const ExtractConfig& cfg);
ExtractorOutput extract(const ImageBuffer& img, const ExtractConfig& cfg);
double logistic(double x);

// y_dec tensor file: "WAMD", u32 n_bits, u32 h, u32 w, then n_bits*h*w little-endian float32.
void write_dec_tensor(const ExtractorOutput& out, const std::string& path);
std::vector<Raster> read_dec_tensor(const std::string& path);

}  // namespace wmseg
