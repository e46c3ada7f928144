#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"
#include "wmseg/error.hpp"
#include "wmseg/jnd.hpp"

using namespace wmseg;

namespace {

double la_oracle(double b, double eps) {
  return b <= 127 ? 17 * (1 - std::sqrt(b / 127 + eps)) + 3 : 3.0 / 128 * (b - 127) + 3;
}

double cm_oracle(double c) { return c == 0 ? 0.0 : 16 * std::pow(c, 2.4) / (c * c + 26.0 * 26.0); }

// Reference heatmap written directly from the formulas, zero-padded interior only.
double h_oracle_interior(const Raster& lum, int i, int j, double gamma, double eps) {
  static const int klum[5][5] = {{1, 1, 1, 1, 1}, {1, 2, 2, 2, 1}, {1, 2, 0, 2, 1}, {1, 2, 2, 2, 1}, {1, 1, 1, 1, 1}};
  static const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  static const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  double b = 0;
  for (int k = -2; k <= 2; ++k)
    for (int l = -2; l <= 2; ++l) b += klum[k + 2][l + 2] * lum.at(i + k, j + l);
  b /= 32;
  double gx = 0, gy = 0;
  for (int k = -1; k <= 1; ++k)
    for (int l = -1; l <= 1; ++l) {
      gx += kx[k + 1][l + 1] * lum.at(i + k, j + l);
      gy += ky[k + 1][l + 1] * lum.at(i + k, j + l);
    }
  const double la = la_oracle(b, eps), cm = cm_oracle(std::sqrt(gx * gx + gy * gy));
  return la + cm - gamma * std::min(la, cm);
}

}  // namespace

TEST(Luminance, Rec601) {
  EXPECT_NEAR(luminance(constant_image(2, 2, 1, 1, 1)).at(1, 1), 255.0, 1e-9);
  EXPECT_EQ(luminance(constant_image(2, 2, 0, 0, 0)).at(0, 0), 0.0);
  EXPECT_NEAR(luminance(constant_image(1, 1, 1, 0, 0)).at(0, 0), 76.245, 1e-9);
}

TEST(BackgroundLuminance, ConstantPreserved) {
  Raster r(7, 7, 91.5);
  for (double v : background_luminance(r).data) EXPECT_NEAR(v, 91.5, 1e-12);
}

TEST(BackgroundLuminance, CenterWeightIsZero) {
  Raster r(5, 5);
  r.at(2, 2) = 32;
  EXPECT_EQ(background_luminance(r).at(2, 2), 0.0);
}

TEST(BackgroundLuminance, WeightTwoImpulse) {
  Raster r(5, 5);
  r.at(1, 2) = 32;
  EXPECT_NEAR(background_luminance(r).at(2, 2), 2.0, 1e-12);
  Raster c(5, 5);
  c.at(0, 0) = 32;
  EXPECT_NEAR(background_luminance(c).at(2, 2), 1.0, 1e-12);
}

TEST(LuminanceAdaptation, ClosedForms) {
  const JndParams p;
  EXPECT_NEAR(luminance_adaptation(127, p), 3.0, 1e-3);
  EXPECT_LE(std::abs(luminance_adaptation(127, p) - 3.0), 10 * p.epsilon);
  EXPECT_NEAR(luminance_adaptation(255, p), 6.0, 1e-6);
  EXPECT_NEAR(luminance_adaptation(0, p), 17 * (1 - std::sqrt(1e-6)) + 3, 1e-12);
  EXPECT_NEAR(luminance_adaptation(0, p), 19.983, 1e-3);
  for (double b = 0; b <= 255; b += 0.5) EXPECT_NEAR(luminance_adaptation(b, p), la_oracle(b, p.epsilon), 1e-12);
}

TEST(ContrastMasking, ClosedForms) {
  EXPECT_EQ(contrast_masking_from_gradient(0.0), 0.0);
  EXPECT_NEAR(contrast_masking_from_gradient(26.0), 8 * std::pow(26.0, 0.4), 1e-6);
  EXPECT_NEAR(contrast_masking_from_gradient(26.0), 29.45, 0.01);
  for (double c : {0.5, 3.0, 100.0, 1020.0}) EXPECT_NEAR(contrast_masking_from_gradient(c), cm_oracle(c), 1e-9);
}

TEST(ContrastMasking, ConstantImageIsZero) {
  for (double v : contrast_masking(Raster(6, 6, 200)).data) EXPECT_EQ(v, 0.0);
}

TEST(ContrastMasking, StepEdgeGradient) {
  Raster r(5, 6);
  for (int i = 0; i < 5; ++i)
    for (int j = 3; j < 6; ++j) r.at(i, j) = 255;
  const Raster c = gradient_magnitude(r);
  EXPECT_NEAR(c.at(2, 2), 1020.0, 1e-9);
  EXPECT_NEAR(c.at(2, 3), 1020.0, 1e-9);
  EXPECT_EQ(c.at(2, 0), 0.0);
}

TEST(JndMap, ConstantMidGray) {
  const JndMap m = jnd_map(constant_image(9, 9, 128 / 255.0, 128 / 255.0, 128 / 255.0), JndParams{});
  const double h = 3.0 / 128 + 3;
  EXPECT_NEAR(m.heatmap.at(4, 4), h, 1e-9);
  EXPECT_NEAR(m.at(0, 4, 4), h, 1e-9);
  EXPECT_NEAR(m.at(1, 4, 4), h, 1e-9);
  EXPECT_NEAR(m.at(2, 4, 4), 2 * h, 1e-9);
}

TEST(JndMap, ConstantImageMatchesComposedClosedForm) {
  const JndParams p;
  for (int code = 0; code <= 255; code += 5) {
    const double v = code / 255.0;
    const Raster h = jnd_heatmap(constant_image(8, 8, v, v, v), p);
    const double lum = 255 * (0.299 * v + 0.587 * v + 0.114 * v);
    for (double x : h.data) EXPECT_NEAR(x, la_oracle(lum, p.epsilon), 1e-6) << code;
  }
}

TEST(JndMap, MatchesDirectFormulaInInterior) {
  const ImageBuffer img = wmseg::testing::random_image(12, 13, 21);
  for (double gamma : {0.0, 0.3, 1.0}) {
    JndParams p;
    p.gamma = gamma;
    const Raster h = jnd_heatmap(img, p);
    const Raster lum = luminance(img);
    for (int i = 2; i < 10; ++i)
      for (int j = 2; j < 11; ++j) EXPECT_NEAR(h.at(i, j), h_oracle_interior(lum, i, j, gamma, p.epsilon), 1e-9);
  }
}

TEST(JndMap, CombineIdentities) {
  EXPECT_NEAR(combine_masking(5.0, 5.0, 0.3), 1.7 * 5.0, 1e-12);
  EXPECT_NEAR(combine_masking(4.0, 9.0, 0.0), 13.0, 1e-12);
}

TEST(JndMap, ChannelRatiosAndLowerBound) {
  const ImageBuffer img = wmseg::testing::random_image(16, 16, 3);
  const JndParams p;
  const JndMap m = jnd_map(img, p);
  const ImageBuffer ch = m.channels();
  const Raster la = luminance_adaptation(background_luminance(luminance(img)), p);
  const Raster cm = contrast_masking(luminance(img));
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      EXPECT_EQ(ch.at(0, i, j), ch.at(1, i, j));
      EXPECT_NEAR(ch.at(2, i, j), 2 * ch.at(1, i, j), 1e-12);
      const double lo = std::max(la.at(i, j), cm.at(i, j)) - p.gamma * std::min(la.at(i, j), cm.at(i, j));
      EXPECT_GE(m.heatmap.at(i, j), lo - 1e-12);
      EXPECT_GE(lo, 0.0);
    }
}

TEST(JndMap, GrayEqualsSingleChannelConstant) {
  const double v = 0.4;
  const Raster gray = jnd_heatmap(constant_image(6, 6, v, v, v), JndParams{});
  const Raster lum_equiv = luminance_adaptation(Raster(6, 6, 255 * v), JndParams{});
  for (std::size_t p = 0; p < gray.size(); ++p) EXPECT_NEAR(gray.data[p], lum_equiv.data[p], 1e-9);
}

TEST(JndMap, MonotoneAroundKnee) {
  const JndParams p;
  double prev = 1e9;
  for (int code = 0; code <= 127; ++code) {
    const double h = jnd_heatmap(constant_image(5, 5, code / 255.0, code / 255.0, code / 255.0), p).at(2, 2);
    EXPECT_LE(h, prev + 1e-12);
    prev = h;
  }
  prev = -1;
  for (int code = 127; code <= 255; ++code) {
    const double h = jnd_heatmap(constant_image(5, 5, code / 255.0, code / 255.0, code / 255.0), p).at(2, 2);
    EXPECT_GE(h, prev - 1e-12);
    prev = h;
  }
}

TEST(JndParams, Validation) {
  JndParams p;
  p.gamma = 1.5;
  EXPECT_THROW(p.validate(), ParamError);
  p = JndParams{};
  p.epsilon = 0;
  EXPECT_THROW(p.validate(), ParamError);
  p = JndParams{};
  p.alpha_rgb = {1, 0, 2};
  EXPECT_THROW(p.validate(), ParamError);
}
