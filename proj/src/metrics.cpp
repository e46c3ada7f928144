#include "wmseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wmseg/error.hpp"
#include "wmseg/filter.hpp"

namespace wmseg {

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_dims(a, b, "psnr");
  if (a.data.empty()) throw DataError("psnr: empty images");
  double se = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    se += d * d;
  }
  if (se == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = se / static_cast<double>(a.data.size());
  return 20.0 * std::log10(1.0 / std::sqrt(mse));
}

namespace {

std::vector<double> gaussian_window() {
  std::vector<double> g(11);
  double s = 0.0;
  for (int i = 0; i < 11; ++i) {
    g[i] = std::exp(-((i - 5) * (i - 5)) / (2.0 * 1.5 * 1.5));
    s += g[i];
  }
  for (double& v : g) v /= s;
  return g;
}

// Gaussian-weighted local mean over the valid region (or edge-replicated when too small).
Raster local_mean(const Raster& src, const std::vector<double>& g) {
  if (src.height < 11 || src.width < 11) return separable(src, g);
  Raster tmp(src.height, src.width - 10), out(src.height - 10, src.width - 10);
  for (int i = 0; i < src.height; ++i)
    for (int j = 0; j < tmp.width; ++j) {
      double acc = 0.0;
      for (int b = 0; b < 11; ++b) acc += g[b] * src.at(i, j + b);
      tmp.at(i, j) = acc;
    }
  for (int i = 0; i < out.height; ++i)
    for (int j = 0; j < out.width; ++j) {
      double acc = 0.0;
      for (int a = 0; a < 11; ++a) acc += g[a] * tmp.at(i + a, j);
      out.at(i, j) = acc;
    }
  return out;
}

}  // namespace

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_dims(a, b, "ssim");
  if (a.data.empty()) throw DataError("ssim: empty images");
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const auto g = gaussian_window();
  double total = 0.0;
  std::size_t count = 0;
  for (int c = 0; c < 3; ++c) {
    const Raster x = a.channel(c), y = b.channel(c);
    Raster xx(x.height, x.width), yy(x.height, x.width), xy(x.height, x.width);
    for (std::size_t p = 0; p < x.size(); ++p) {
      xx.data[p] = x.data[p] * x.data[p];
      yy.data[p] = y.data[p] * y.data[p];
      xy.data[p] = x.data[p] * y.data[p];
    }
    const Raster mx = local_mean(x, g), my = local_mean(y, g);
    const Raster sxx = local_mean(xx, g), syy = local_mean(yy, g), sxy = local_mean(xy, g);
    for (std::size_t p = 0; p < mx.size(); ++p) {
      const double vx = sxx.data[p] - mx.data[p] * mx.data[p];
      const double vy = syy.data[p] - my.data[p] * my.data[p];
      const double cxy = sxy.data[p] - mx.data[p] * my.data[p];
      total += ((2 * mx.data[p] * my.data[p] + c1) * (2 * cxy + c2)) /
               ((mx.data[p] * mx.data[p] + my.data[p] * my.data[p] + c1) * (vx + vy + c2));
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

double bit_accuracy(const Message& a, const Message& b) {
  if (a.size() != b.size()) throw DataError("bit_accuracy: message length mismatch");
  if (a.size() == 0) throw DataError("bit_accuracy: empty messages");
  return 1.0 - static_cast<double>(hamming(a, b)) / a.size();
}

double miou(const MaskMap& pred, const MaskMap& gt) {
  require_same_dims(pred, gt, "miou");
  std::size_t inter[2] = {0, 0}, uni[2] = {0, 0};
  for (std::size_t p = 0; p < pred.size(); ++p) {
    const bool x = pred.data[p] > 0.5, y = gt.data[p] > 0.5;
    for (int cls = 0; cls < 2; ++cls) {
      const bool px = x == static_cast<bool>(cls), py = y == static_cast<bool>(cls);
      inter[cls] += px && py;
      uni[cls] += px || py;
    }
  }
  double s = 0.0;
  for (int cls = 0; cls < 2; ++cls) s += uni[cls] == 0 ? 1.0 : static_cast<double>(inter[cls]) / uni[cls];
  return s / 2.0;
}

Rates tpr_fpr(const std::vector<std::pair<bool, bool>>& decisions) {
  std::size_t pos = 0, neg = 0, tp = 0, fp = 0;
  for (auto [flagged, wm] : decisions) {
    if (wm) {
      ++pos;
      tp += flagged;
    } else {
      ++neg;
      fp += flagged;
    }
  }
  if (pos == 0) throw DataError("tpr_fpr: no watermarked samples (TPR undefined)");
  if (neg == 0) throw DataError("tpr_fpr: no clean samples (FPR undefined)");
  return {static_cast<double>(tp) / pos, static_cast<double>(fp) / neg};
}

namespace {
inline double bce(double y, bool target) {
  const double q = std::clamp(y, kLogClamp, 1.0 - kLogClamp);
  return target ? -std::log(q) : -std::log(1.0 - q);
}
}  // namespace

double loss_det(const Raster& y_det, const MaskMap& gt) {
  require_same_dims(y_det, gt, "loss_det");
  if (y_det.size() == 0) throw DataError("loss_det: empty input");
  double s = 0.0;
  for (std::size_t p = 0; p < y_det.size(); ++p) s += bce(y_det.data[p], gt.data[p] > 0.5);
  return s / static_cast<double>(y_det.size());
}

double loss_dec(const std::vector<Raster>& y_dec, const MaskMap& gt, const Message& msg) {
  if (static_cast<int>(y_dec.size()) != msg.size()) throw DataError("loss_dec: message length mismatch");
  if (y_dec.empty()) throw DataError("loss_dec: empty message");
  for (const auto& r : y_dec) require_same_dims(r, gt, "loss_dec");
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t p = 0; p < gt.size(); ++p) {
    if (!(gt.data[p] > 0.5)) continue;
    ++count;
    for (int k = 0; k < msg.size(); ++k) s += bce(y_dec[k].data[p], msg[k]);
  }
  if (count == 0) throw DataError("loss_dec: empty ground-truth mask");
  return s / (static_cast<double>(count) * msg.size());
}

double loss_dec_multi(const std::vector<Raster>& y_dec, const std::vector<MaskMap>& masks,
                      const std::vector<Message>& msgs) {
  if (masks.size() != msgs.size()) throw DataError("loss_dec: masks and messages differ in count");
  double s = 0.0;
  for (std::size_t i = 0; i < masks.size(); ++i) s += loss_dec(y_dec, masks[i], msgs[i]);
  return s;
}

}  // namespace wmseg
