#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_util.hpp"
#include "wmseg/error.hpp"
#include "wmseg/metrics.hpp"

using namespace wmseg;
using wmseg::testing::random_image;
using wmseg::testing::random_mask;

namespace {

ImageBuffer shifted(const ImageBuffer& a, double d) {
  ImageBuffer b = a;
  for (double& v : b.data) v += d;
  return b;
}

std::vector<Raster> constant_dec(int n, int h, int w, double v) { return std::vector<Raster>(n, Raster(h, w, v)); }

}  // namespace

TEST(Psnr, ClosedForms) {
  const ImageBuffer a(8, 8, 0.25);
  EXPECT_EQ(psnr(a, a), std::numeric_limits<double>::infinity());
  const double p1 = psnr(a, shifted(a, 1.0 / 255));
  const double p2 = psnr(a, shifted(a, 2.0 / 255));
  EXPECT_NEAR(p1, 20 * std::log10(255.0), 1e-9);
  EXPECT_NEAR(p1, 48.13, 5e-3);
  EXPECT_NEAR(p2, 42.11, 5e-3);
  EXPECT_NEAR(p1 - p2, 20 * std::log10(2.0), 1e-9);
  EXPECT_THROW(psnr(a, ImageBuffer(8, 9)), DataError);
}

TEST(Psnr, DecreasesWithErrorMagnitude) {
  const ImageBuffer a = random_image(16, 16, 1);
  double prev = std::numeric_limits<double>::infinity();
  for (double d : {0.001, 0.01, 0.1}) {
    const double p = psnr(a, shifted(a, d));
    EXPECT_LT(p, prev);
    EXPECT_GE(p, 0.0);
    prev = p;
  }
}

TEST(Ssim, ClosedFormsAndSymmetry) {
  const ImageBuffer a = random_image(32, 24, 2), b = random_image(32, 24, 3);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
  EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-12);
  const double c1 = 1e-4;
  EXPECT_NEAR(ssim(ImageBuffer(20, 20, 0.0), ImageBuffer(20, 20, 1.0)), c1 / (1 + c1), 1e-12);
  EXPECT_NEAR(ssim(ImageBuffer(5, 5, 0.0), ImageBuffer(5, 5, 1.0)), c1 / (1 + c1), 1e-12);
  const double s = ssim(a, b);
  EXPECT_GE(s, -1.0);
  EXPECT_LE(s, 1.0);
  EXPECT_THROW(ssim(a, ImageBuffer(32, 23)), DataError);
}

TEST(BitAccuracy, Examples) {
  CounterRng rng(4);
  const Message m = Message::random(32, rng);
  EXPECT_EQ(bit_accuracy(m, m), 1.0);
  Message one = m;
  one.set(7, !m[7]);
  EXPECT_EQ(bit_accuracy(m, one), 31.0 / 32);
  Message inv = m;
  for (int k = 0; k < 32; ++k) inv.set(k, !m[k]);
  EXPECT_EQ(bit_accuracy(m, inv), 0.0);
  EXPECT_THROW(bit_accuracy(m, Message(31)), DataError);
}

TEST(Miou, Examples) {
  const MaskMap gt = rect_mask(10, 10, 0, 0, 5, 10);
  EXPECT_EQ(miou(gt, gt), 1.0);
  EXPECT_EQ(miou(MaskMap(10, 10, 1.0), gt), 0.25);
  EXPECT_EQ(miou(complement(gt), gt), 0.0);
  EXPECT_EQ(miou(MaskMap(4, 4, 1.0), MaskMap(4, 4, 1.0)), 1.0);
  EXPECT_THROW(miou(gt, MaskMap(10, 11)), DataError);
}

TEST(Miou, ClassSymmetricAndMatchesCounting) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const MaskMap p = random_mask(17, 19, s, 0.3), g = random_mask(17, 19, s + 100, 0.6);
    EXPECT_NEAR(miou(p, g), miou(complement(p), complement(g)), 1e-15);
    double iou[2];
    for (int cls = 0; cls < 2; ++cls) {
      int in = 0, un = 0;
      for (std::size_t q = 0; q < p.size(); ++q) {
        const bool a = (p.data[q] > 0.5) == cls, b = (g.data[q] > 0.5) == cls;
        in += a && b;
        un += a || b;
      }
      iou[cls] = un ? static_cast<double>(in) / un : 1.0;
    }
    EXPECT_NEAR(miou(p, g), (iou[0] + iou[1]) / 2, 1e-15);
  }
}

TEST(TprFpr, Examples) {
  std::vector<std::pair<bool, bool>> d;
  for (int i = 0; i < 4; ++i) d.push_back({i < 3, true});
  for (int i = 0; i < 10; ++i) d.push_back({i < 1, false});
  const Rates r = tpr_fpr(d);
  EXPECT_EQ(r.tpr, 0.75);
  EXPECT_EQ(r.fpr, 0.1);
  const Rates all = tpr_fpr({{true, true}, {true, false}});
  EXPECT_EQ(all.tpr, 1.0);
  EXPECT_EQ(all.fpr, 1.0);
  const Rates ok = tpr_fpr({{true, true}, {false, false}});
  EXPECT_EQ(ok.tpr, 1.0);
  EXPECT_EQ(ok.fpr, 0.0);
  EXPECT_THROW(tpr_fpr({{true, true}}), DataError);
  EXPECT_THROW(tpr_fpr({{true, false}}), DataError);
}

TEST(LossDet, ClosedForms) {
  const MaskMap gt = random_mask(12, 12, 5);
  EXPECT_NEAR(loss_det(Raster(12, 12, 0.5), gt), std::log(2.0), 1e-9);
  EXPECT_LE(loss_det(gt, gt), 1e-6);
  EXPECT_GE(loss_det(gt, gt), 0.0);
  EXPECT_NEAR(loss_det(complement(gt), gt), -std::log(kLogClamp), 1e-6);
  EXPECT_NEAR(-std::log(kLogClamp), 16.12, 5e-3);
  EXPECT_THROW(loss_det(Raster(12, 11), gt), DataError);
}

TEST(LossDec, ClosedFormsAndGating) {
  const MaskMap gt = rect_mask(10, 10, 2, 2, 5, 5);
  CounterRng rng(6);
  const Message m = Message::random(16, rng);
  EXPECT_NEAR(loss_dec(constant_dec(16, 10, 10, 0.5), gt, m), std::log(2.0), 1e-9);
  std::vector<Raster> perfect;
  for (int k = 0; k < 16; ++k) perfect.emplace_back(10, 10, m[k]);
  EXPECT_LE(loss_dec(perfect, gt, m), 1e-6);
  std::vector<Raster> noisy = constant_dec(16, 10, 10, 0.3);
  for (auto& r : noisy)
    for (double& v : r.data) v = rng.uniform();
  const double base = loss_dec(noisy, gt, m);
  EXPECT_GE(base, 0.0);
  for (auto& r : noisy)
    for (std::size_t q = 0; q < r.size(); ++q)
      if (gt.data[q] <= 0.5) r.data[q] = rng.uniform();
  EXPECT_EQ(loss_dec(noisy, gt, m), base);
  EXPECT_THROW(loss_dec(perfect, MaskMap(10, 10), m), DataError);
  EXPECT_THROW(loss_dec(constant_dec(15, 10, 10, 0.5), gt, m), DataError);
}

TEST(LossDec, NormalizationAndMultiSum) {
  const MaskMap gt = rect_mask(4, 4, 0, 0, 1, 2);
  const Message m = Message::from_string("10");
  std::vector<Raster> y = constant_dec(2, 4, 4, 0.5);
  y[0].at(0, 0) = 0.8;
  const double want = (-std::log(0.8) - std::log(0.5) - std::log(0.5) - std::log(0.5)) / 4;
  EXPECT_NEAR(loss_dec(y, gt, m), want, 1e-12);
  const MaskMap gt2 = rect_mask(4, 4, 3, 0, 1, 4);
  const Message m2 = Message::from_string("01");
  EXPECT_NEAR(loss_dec_multi(y, {gt, gt2}, {m, m2}), want + std::log(2.0), 1e-12);
  EXPECT_THROW(loss_dec_multi(y, {gt}, {m, m2}), DataError);
}
