#include "wmseg/postproc.hpp"

#include <algorithm>
#include <cmath>

#include "wmseg/error.hpp"

namespace wmseg {

namespace {
void check_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ParamError("threshold must be in [0,1]");
}
}  // namespace

MaskMap localize(const ExtractorOutput& out, double tau) {
  check_tau(tau);
  MaskMap m(out.height(), out.width());
  for (std::size_t p = 0; p < m.size(); ++p) m.data[p] = out.det.data[p] > tau ? 1.0 : 0.0;
  return m;
}

double detection_score(const MaskMap& det, double tau) {
  if (det.size() == 0) return 0.0;
  std::size_t n = 0;
  for (double v : det.data) n += v > tau;
  return static_cast<double>(n) / static_cast<double>(det.size());
}

DetectionDecision detect_image(const ExtractorOutput& out, double tau, double tau_image) {
  check_tau(tau);
  check_tau(tau_image);
  DetectionDecision d;
  d.tau_pixel = tau;
  d.tau_image = tau_image;
  d.s_det = detection_score(out.det, tau);
  d.flagged = d.s_det > tau_image;
  return d;
}

Message decode_single(const ExtractorOutput& out, double tau) {
  check_tau(tau);
  const int n_bits = out.n_bits();
  std::vector<double> sums(n_bits, 0.0);
  std::size_t count = 0;
  for (std::size_t p = 0; p < out.det.size(); ++p) {
    if (!(out.det.data[p] > tau)) continue;
    ++count;
    for (int k = 0; k < n_bits; ++k) sums[k] += out.dec[k].data[p];
  }
  if (count == 0) throw NoWatermarkedPixels();
  Message m(n_bits);
  for (int k = 0; k < n_bits; ++k) m.set(k, sums[k] / static_cast<double>(count) > 0.5);
  return m;
}

double calibrate_tau_pooled(std::vector<double>& values, double target_fpr) {
  if (!(target_fpr > 0.0 && target_fpr <= 1.0)) throw ParamError("target FPR must be in (0,1]");
  if (static_cast<double>(values.size()) < 10.0 / target_fpr)
    throw DataError("insufficient calibration pixels for the requested FPR");
  const double pos = (1.0 - target_fpr) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  std::nth_element(values.begin(), values.begin() + lo, values.end());
  const double a = values[lo];
  if (frac == 0.0 || lo + 1 >= values.size()) return a;
  const double b = *std::min_element(values.begin() + lo + 1, values.end());
  return a + frac * (b - a);
}

double calibrate_tau(const std::vector<ExtractorOutput>& negatives, double target_fpr) {
  std::vector<double> pooled;
  for (const auto& o : negatives) pooled.insert(pooled.end(), o.det.data.begin(), o.det.data.end());
  return calibrate_tau_pooled(pooled, target_fpr);
}

double measured_fpr(const std::vector<double>& values, double tau) {
  if (values.empty()) return 0.0;
  std::size_t n = 0;
  for (double v : values) n += v > tau;
  return static_cast<double>(n) / static_cast<double>(values.size());
}

}  // namespace wmseg
