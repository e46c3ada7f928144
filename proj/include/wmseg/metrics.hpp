#pragma once

#include <utility>
#include <vector>

#include "wmseg/image.hpp"
#include "wmseg/message.hpp"

namespace wmseg {

constexpr double kLogClamp = 1e-7;

// PSNR in dB on the [0,1] range; +infinity for identical inputs.
double psnr(const ImageBuffer& a, const ImageBuffer& b);
// Single-scale SSIM, 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03, range 1.
// Statistics are taken over windows lying fully inside the image; images smaller than the
// window use edge-replicated filtering.
double ssim(const ImageBuffer& a, const ImageBuffer& b);
double bit_accuracy(const Message& a, const Message& b);
// Two-class mean IoU; a class absent from both maps contributes 1.
double miou(const MaskMap& pred, const MaskMap& gt);

struct Rates {
  double tpr = 0.0;
  double fpr = 0.0;
};
// Pairs of (flagged, is_watermarked).
Rates tpr_fpr(const std::vector<std::pair<bool, bool>>& decisions);

// Mean pixel-wise binary cross-entropy of y_det against the binarized ground truth.
double loss_det(const Raster& y_det, const MaskMap& gt);
// Bit-wise cross-entropy over the ground-truth pixels, normalized by n_bits x pixel count.
double loss_dec(const std::vector<Raster>& y_dec, const MaskMap& gt, const Message& msg);
// Sum of loss_dec over (mask, message) pairs.
double loss_dec_multi(const std::vector<Raster>& y_dec, const std::vector<MaskMap>& masks,
                      const std::vector<Message>& msgs);

}  // namespace wmseg
