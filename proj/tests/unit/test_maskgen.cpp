#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"
#include "wmseg/error.hpp"
#include "wmseg/harness.hpp"
#include "wmseg/maskgen.hpp"
#include "wmseg/raster_io.hpp"

using namespace wmseg;

namespace {

bool is_binary(const MaskMap& m) {
  for (double v : m.data)
    if (v != 0.0 && v != 1.0) return false;
  return true;
}

}  // namespace

TEST(BoxMask, PlacementWithinMargin) {
  CounterRng rng(1);
  for (int t = 0; t < 2000; ++t) {
    const Box b = sample_box(256, 200, rng);
    EXPECT_GE(b.height, kBoxMin);
    EXPECT_LE(b.height, kBoxMax);
    EXPECT_GE(b.width, kBoxMin);
    EXPECT_LE(b.width, kBoxMax);
    EXPECT_GE(b.top, kBoxMargin);
    EXPECT_GE(b.left, kBoxMargin);
    EXPECT_LE(b.top + b.height, 256 - kBoxMargin);
    EXPECT_LE(b.left + b.width, 200 - kBoxMargin);
  }
}

TEST(BoxMask, SingleBoxArea) { EXPECT_EQ(popcount(rect_mask(256, 256, 10, 10, 30, 30)), 900u); }

TEST(BoxMask, WidthHistogramUniform) {
  CounterRng rng(2);
  std::vector<int> hist(71, 0);
  const int n = 10000;
  for (int t = 0; t < n; ++t) ++hist[sample_box(256, 256, rng).width - 30];
  const double expect = n / 71.0;
  double chi2 = 0;
  for (int c : hist) chi2 += (c - expect) * (c - expect) / expect;
  EXPECT_LT(chi2, 100.425);  // chi-square 0.99 quantile, 70 degrees of freedom
}

TEST(BoxMask, UnionBoundAndBinary) {
  CounterRng rng(3);
  for (int t = 0; t < 200; ++t) {
    const MaskMap m = sample_box_masks(256, 256, rng);
    EXPECT_TRUE(is_binary(m));
    EXPECT_GE(popcount(m), 900u);
    EXPECT_LE(popcount(m), 3u * 100 * 100);
  }
}

TEST(BoxMask, SmallImagesClamp) {
  CounterRng rng(4);
  for (int t = 0; t < 100; ++t) {
    const Box b = sample_box(40, 60, rng);
    EXPECT_GE(b.top, 0);
    EXPECT_LE(b.top + b.height, 40);
    EXPECT_LE(b.left + b.width, 60);
    EXPECT_GT(b.height, 0);
  }
  EXPECT_NO_THROW(sample_box_masks(8, 8, rng));
}

TEST(IrregularMask, SingleDiscArea) {
  MaskMap m(64, 64);
  stamp_disc(m, 32, 32, 20);
  EXPECT_GE(popcount(m), 290u);
  EXPECT_LE(popcount(m), 340u);
}

TEST(IrregularMask, DiscClippedAtBorder) {
  MaskMap m(16, 16);
  stamp_disc(m, 0, 0, 20);
  EXPECT_TRUE(is_binary(m));
  EXPECT_GT(popcount(m), 0u);
  EXPECT_LT(popcount(m), 340u / 2);
}

TEST(IrregularMask, CoverageBand) {
  CounterRng rng(5);
  double cov = 0;
  for (int t = 0; t < 1000; ++t) {
    const MaskMap m = sample_irregular_mask(256, 256, rng);
    ASSERT_TRUE(is_binary(m));
    ASSERT_EQ(m.size(), 256u * 256);
    cov += static_cast<double>(popcount(m)) / (256.0 * 256.0);
  }
  cov /= 1000;
  EXPECT_GE(cov, 0.02);
  EXPECT_LE(cov, 0.40);
}

TEST(SampleMask, FullAndInvertedFull) {
  CounterRng rng(6);
  MaskGenConfig c;
  c.weights = {0, 1, 0, 0};
  c.invert_prob = 1;
  EXPECT_EQ(popcount(sample_mask(32, 32, c, rng)), 0u);
  c.invert_prob = 0;
  EXPECT_EQ(popcount(sample_mask(32, 32, c, rng)), 1024u);
}

TEST(SampleMask, SeedReproducible) {
  MaskGenConfig c;
  c.weights = {0.5, 0, 0.5, 0};
  for (std::uint64_t s = 0; s < 20; ++s) {
    CounterRng a(s), b(s);
    EXPECT_EQ(sample_mask(128, 128, c, a).data, sample_mask(128, 128, c, b).data);
  }
}

TEST(SampleMask, KindAndCountFrequencies) {
  MaskGenConfig c;
  CounterRng rng(7);
  std::array<int, 4> kinds{};
  std::array<int, 3> counts{};
  const int n = 20000;
  for (int t = 0; t < n; ++t) {
    ++kinds[static_cast<int>(sample_kind(c, rng))];
    ++counts[sample_mask_count(c, rng) - 1];
  }
  for (int k : kinds) EXPECT_NEAR(k / static_cast<double>(n), 0.25, 0.015);
  EXPECT_NEAR(counts[0] / static_cast<double>(n), 0.6, 0.015);
  EXPECT_NEAR(counts[1] / static_cast<double>(n), 0.2, 0.015);
  EXPECT_NEAR(counts[2] / static_cast<double>(n), 0.2, 0.015);
}

TEST(SampleMask, InversionRate) {
  MaskGenConfig c;
  c.weights = {0, 1, 0, 0};
  CounterRng rng(8);
  int inverted = 0;
  for (int t = 0; t < 4000; ++t) inverted += popcount(sample_mask(4, 4, c, rng)) == 0;
  EXPECT_NEAR(inverted / 4000.0, 0.5, 0.03);
}

TEST(SampleMask, ExternalKind) {
  wmseg::testing::TempDir d;
  MaskMap ext(32, 32);
  for (int j = 0; j < 32; ++j) ext.at(0, j) = 1;
  save_mask(ext, d.file("ext.pgm"));
  MaskGenConfig c;
  c.weights = {0, 0, 0, 1};
  c.invert_prob = 0;
  CounterRng rng(9);
  EXPECT_THROW(sample_mask(32, 32, c, rng), DataError);
  c.external_files = {d.file("ext.pgm")};
  EXPECT_EQ(popcount(sample_mask(32, 32, c, rng)), 32u);
}

TEST(SampleMask, ConfigValidation) {
  MaskGenConfig c;
  c.weights = {0.5, 0.5, 0.5, 0};
  EXPECT_THROW(c.validate(), ParamError);
  c = MaskGenConfig{};
  c.invert_prob = 1.5;
  EXPECT_THROW(c.validate(), ParamError);
  c = MaskGenConfig{};
  c.multi_counts = {0.5, 0.5, -0.0001};
  EXPECT_THROW(c.validate(), ParamError);
  EXPECT_THROW(parse_mask_kind("blob"), ParamError);
}

TEST(DisjointMasks, PairwiseDisjoint) {
  CounterRng rng(10);
  for (int count = 1; count <= 5; ++count)
    for (int t = 0; t < 20; ++t) {
      const auto ms = sample_disjoint_masks(256, 256, count, rng);
      ASSERT_EQ(static_cast<int>(ms.size()), count);
      MaskMap uni(256, 256);
      std::size_t sum = 0;
      for (const auto& m : ms) {
        EXPECT_TRUE(is_binary(m));
        sum += popcount(m);
        for (std::size_t p = 0; p < m.size(); ++p) uni.data[p] = std::max(uni.data[p], m.data[p]);
      }
      EXPECT_EQ(sum, popcount(uni));
    }
}

TEST(DisjointMasks, ImpossiblePlacementFails) {
  CounterRng rng(11);
  EXPECT_THROW(sample_disjoint_masks(60, 60, 5, rng), DataError);
  EXPECT_THROW(sample_disjoint_masks(256, 256, 6, rng), ParamError);
}

TEST(CheckerboardMasks, SquaresAndOwnership) {
  const auto ms = checkerboard_masks(5);
  ASSERT_EQ(ms.size(), 5u);
  EXPECT_EQ(popcount(ms[4]), 6400u);
  for (int q = 0; q < 4; ++q) EXPECT_EQ(popcount(ms[q]), 6400u - 16 * 16);
  std::size_t sum = 0;
  MaskMap uni(256, 256);
  for (const auto& m : ms) {
    sum += popcount(m);
    for (std::size_t p = 0; p < m.size(); ++p) uni.data[p] = std::max(uni.data[p], m.data[p]);
  }
  EXPECT_EQ(sum, popcount(uni));
  const auto four = checkerboard_masks(4);
  for (const auto& m : four) EXPECT_EQ(popcount(m), 6400u);
}
