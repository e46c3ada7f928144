#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <filesystem>

#include "test_util.hpp"
#include "wmseg/corpus.hpp"
#include "wmseg/error.hpp"
#include "wmseg/harness.hpp"

using namespace wmseg;

namespace {

const std::vector<ImageBuffer>& corpus() {
  static const std::vector<ImageBuffer> c = synthetic_corpus(4, 256, 21);
  return c;
}

CodecSettings codec() { return CodecSettings::for_key(WatermarkKey::from_u64(9)); }

HarnessOptions opts() {
  HarnessOptions o;
  o.seed = 3;
  o.jobs = 2;
  return o;
}

}  // namespace

TEST(Harness, CenteredRect) {
  const MaskMap m = centered_rect(256, 256, 0.25);
  EXPECT_EQ(popcount(m), 128u * 128);
  EXPECT_EQ(m.at(64, 64), 1.0);
  EXPECT_EQ(m.at(191, 191), 1.0);
  EXPECT_EQ(m.at(63, 64), 0.0);
  EXPECT_EQ(m.at(192, 191), 0.0);
  EXPECT_EQ(popcount(centered_rect(100, 60, 1.0)), 6000u);
  EXPECT_EQ(popcount(centered_rect(256, 256, 0.1)), 80u * 80);
}

TEST(Harness, ParallelForCoversEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  std::vector<double> a(200), b(200);
  parallel_for(200, 1, [&](std::size_t i) { a[i] = std::sin(static_cast<double>(i)); });
  parallel_for(200, 8, [&](std::size_t i) { b[i] = std::sin(static_cast<double>(i)); });
  EXPECT_EQ(a, b);
}

TEST(Harness, ParseProtocol) {
  EXPECT_EQ(parse_protocol("multiwm"), Protocol::multiwm);
  EXPECT_EQ(protocol_name(Protocol::dbscan_grid), "dbscan_grid");
  EXPECT_THROW(parse_protocol("bogus"), ParamError);
}

TEST(Harness, TransformMaskFollowsGeometryOnly) {
  const MaskMap m = centered_rect(64, 64, 0.25);
  EXPECT_EQ(transform_mask(m, parse_chain("brightness:1.5,jpeg:50")).data, m.data);
  const MaskMap c = transform_mask(m, parse_chain("crop:0.5"));
  EXPECT_EQ(c.height, 32);
}

TEST(Localization, FullFractionNoCrop) {
  const EvalReport r = run_localization(corpus(), codec(), {1.0, 0.25}, false, opts());
  ASSERT_EQ(r.rows.size(), 2u);
  const ReportRow& full = r.rows[0];
  EXPECT_EQ(full.get("fraction"), 1.0);
  EXPECT_GE(full.get("miou"), 0.0);
  EXPECT_LE(full.get("miou"), 1.0);
  EXPECT_GE(full.get("bit_acc"), 0.99);
  EXPECT_GE(full.get("psnr"), 30.0);
  EXPECT_EQ(r.corpus_size, 4u);
  const EvalReport again = run_localization(corpus(), codec(), {1.0, 0.25}, false, opts());
  EXPECT_EQ(again.to_json().dump(), r.to_json().dump());
}

TEST(Multiwm, SingleMessageGivesOneCluster) {
  MultiwmResult s;
  run_multiwm(corpus(), codec(), 1, {}, DbscanParams{}, opts(), &s);
  EXPECT_EQ(s.images, 4u);
  EXPECT_EQ(s.exact_k, 4u);
  EXPECT_EQ(s.mean_clusters, 1.0);
  EXPECT_EQ(s.bit_accuracy, 1.0);
  EXPECT_GE(s.miou_min, 0.5);
}

TEST(Multiwm, RequiresCanvasSize) {
  const std::vector<ImageBuffer> small = synthetic_corpus(1, 128, 1);
  EXPECT_THROW(run_multiwm(small, codec(), 5, {}, DbscanParams{}, opts()), DataError);
}

TEST(DbscanGrid, SinglePointMatchesMultiwm) {
  const EvalReport grid = run_dbscan_grid(corpus(), codec(), {1}, {1000}, {}, opts());
  const EvalReport mw = run_multiwm(corpus(), codec(), 5, {}, DbscanParams{}, opts());
  ASSERT_EQ(grid.rows.size(), 1u);
  EXPECT_EQ(grid.rows[0].get("selected"), 1.0);
  EXPECT_EQ(grid.rows[0].get("mean_clusters"), mw.rows[0].get("mean_clusters"));
  EXPECT_EQ(grid.rows[0].get("exact_k_rate"), mw.rows[0].get("exact_k_rate"));
  EXPECT_NEAR(grid.rows[0].get("miou"), mw.rows[0].get("miou"), 1e-12);
}

TEST(Robustness, IdentityRowAndUndefinedRates) {
  const std::vector<ImageBuffer> pos(corpus().begin(), corpus().begin() + 2), neg(corpus().begin() + 2, corpus().end());
  const EvalReport r = run_robustness(pos, neg, codec(), {parse_chain("identity")}, opts());
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].get("tpr"), 1.0);
  EXPECT_EQ(r.rows[0].get("fpr"), 0.0);
  EXPECT_EQ(r.rows[0].get("bit_acc"), 1.0);
  const EvalReport negonly = run_robustness({}, neg, codec(), {parse_chain("identity")}, opts());
  EXPECT_TRUE(std::isnan(negonly.rows[0].get("tpr")));
  EXPECT_TRUE(negonly.to_json()["rows"][0]["metrics"]["tpr"].is_null());
  EXPECT_FALSE(negonly.notes.empty());
}

TEST(Robustness, DefaultAugsCoverTable) {
  const auto augs = default_robustness_augs();
  EXPECT_EQ(augs.size(), 26u);
  EXPECT_EQ(chain_label(augs.front()), "identity");
  EXPECT_EQ(augs.back().size(), 3u);
}

TEST(Report, JsonCsvAndHash) {
  EvalReport r;
  r.protocol = "robustness";
  r.corpus_id = corpus_hash(corpus());
  EXPECT_EQ(r.corpus_id, corpus_hash(synthetic_corpus(4, 256, 21)));
  EXPECT_NE(r.corpus_id, corpus_hash(synthetic_corpus(4, 256, 22)));
  ReportRow row;
  row.label = "a";
  row.set("x", 1.5);
  row.set("y", std::numeric_limits<double>::infinity());
  r.rows.push_back(row);
  ReportRow row2;
  row2.label = "b";
  row2.set("z", std::numeric_limits<double>::quiet_NaN());
  r.rows.push_back(row2);
  const auto j = r.to_json();
  EXPECT_EQ(j["rows"][0]["metrics"]["x"], 1.5);
  EXPECT_EQ(j["rows"][0]["metrics"]["y"], "inf");
  EXPECT_TRUE(j["rows"][1]["metrics"]["z"].is_null());
  const std::string csv = r.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "label,x,y,z");
  EXPECT_THROW(r.row("missing"), DataError);
}

TEST(Harness, DumpDirWritesMasks) {
  wmseg::testing::TempDir d;
  HarnessOptions o = opts();
  o.dump_dir = d.file("dump");
  const std::vector<ImageBuffer> one(corpus().begin(), corpus().begin() + 1);
  run_localization(one, codec(), {0.5}, false, o);
  EXPECT_TRUE(std::filesystem::exists(d.file("dump/localization_f0_0.pgm")));
}
