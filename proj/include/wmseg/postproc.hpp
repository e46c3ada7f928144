#pragma once

#include <vector>

#include "wmseg/codec.hpp"

namespace wmseg {

constexpr double kDefaultTauImage = 0.07;

struct DetectionDecision {
  double s_det = 0.0;
  bool flagged = false;
  double tau_pixel = 0.5;
  double tau_image = kDefaultTauImage;
};

// 1 where y_det > tau.
MaskMap localize(const ExtractorOutput& out, double tau);
double detection_score(const MaskMap& det, double tau);
DetectionDecision detect_image(const ExtractorOutput& out, double tau, double tau_image = kDefaultTauImage);
// Bit k is 1 iff the mean of y_dec[k] over pixels with y_det > tau exceeds 0.5.
// Throws NoWatermarkedPixels when no pixel passes tau.
Message decode_single(const ExtractorOutput& out, double tau);

// (1 - target_fpr)-quantile with linear interpolation between order statistics.
// Requires values.size() >= 10 / target_fpr. The vector is reordered.
double calibrate_tau_pooled(std::vector<double>& values, double target_fpr);
double calibrate_tau(const std::vector<ExtractorOutput>& negatives, double target_fpr);
// Fraction of values strictly above tau.
double measured_fpr(const std::vector<double>& values, double tau);

}  // namespace wmseg
