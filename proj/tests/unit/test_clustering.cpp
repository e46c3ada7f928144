#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <deque>
#include <map>
#include <numeric>

#include "test_util.hpp"
#include "wmseg/clustering.hpp"
#include "wmseg/error.hpp"

using namespace wmseg;

namespace {

// Textbook DBSCAN with exhaustive neighborhoods, points visited in index order.
std::vector<int> naive_dbscan(const std::vector<std::uint64_t>& pts, int eps, std::int64_t min_samples) {
  const std::size_t n = pts.size();
  auto nbrs = [&](std::size_t p) {
    std::vector<std::size_t> out;
    for (std::size_t q = 0; q < n; ++q)
      if (std::popcount(pts[p] ^ pts[q]) <= eps) out.push_back(q);
    return out;
  };
  std::vector<int> label(n, -2);
  int next = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (label[p] != -2) continue;
    auto nb = nbrs(p);
    if (static_cast<std::int64_t>(nb.size()) < min_samples) {
      label[p] = -1;
      continue;
    }
    const int c = next++;
    label[p] = c;
    std::deque<std::size_t> queue(nb.begin(), nb.end());
    while (!queue.empty()) {
      const std::size_t q = queue.front();
      queue.pop_front();
      if (label[q] == -1) label[q] = c;
      if (label[q] != -2) continue;
      label[q] = c;
      auto nq = nbrs(q);
      if (static_cast<std::int64_t>(nq.size()) >= min_samples) queue.insert(queue.end(), nq.begin(), nq.end());
    }
  }
  return label;
}

bool same_up_to_renumbering(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] == -1) != (b[i] == -1)) return false;
    if (a[i] == -1) continue;
    auto [it, fresh] = ab.emplace(a[i], b[i]);
    if (!fresh && it->second != b[i]) return false;
    auto [jt, fresh2] = ba.emplace(b[i], a[i]);
    if (!fresh2 && jt->second != a[i]) return false;
  }
  return true;
}

std::vector<std::uint64_t> random_points(CounterRng& rng, int n_bits, std::size_t n) {
  const std::uint64_t mask = n_bits == 64 ? ~0ull : ((1ull << n_bits) - 1);
  const int centers = static_cast<int>(rng.uniform_int(1, 4));
  std::vector<std::uint64_t> c;
  for (int i = 0; i < centers; ++i) c.push_back(rng.next_u64() & mask);
  std::vector<std::uint64_t> pts;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t w = c[rng.uniform_int(0, centers - 1)];
    const int flips = static_cast<int>(rng.uniform_int(0, 3));
    for (int f = 0; f < flips; ++f) w ^= 1ull << rng.uniform_int(0, n_bits - 1);
    pts.push_back(rng.bernoulli(0.1) ? rng.next_u64() & mask : w);
  }
  return pts;
}

std::vector<Message> as_messages(const std::vector<std::uint64_t>& pts, int n_bits) {
  std::vector<Message> out;
  for (auto w : pts) out.push_back(Message::from_packed(w, n_bits));
  return out;
}

}  // namespace

TEST(Dbscan, MatchesNaiveReference) {
  CounterRng rng(2024);
  for (int t = 0; t < 150; ++t) {
    const int n_bits = static_cast<int>(rng.uniform_int(2, 16));
    const auto n = static_cast<std::size_t>(rng.uniform_int(0, 300));
    const auto pts = random_points(rng, n_bits, n);
    for (int eps : {0, 1, 2})
      for (std::int64_t ms : {1, 3, 10}) {
        const auto got = dbscan_labels(pts, n_bits, DbscanParams{eps, ms});
        EXPECT_TRUE(same_up_to_renumbering(got, naive_dbscan(pts, eps, ms)))
            << "trial " << t << " eps " << eps << " ms " << ms;
      }
  }
}

TEST(Dbscan, WideWordsUseScanPath) {
  CounterRng rng(7);
  for (int t = 0; t < 20; ++t) {
    const auto pts = random_points(rng, 64, 200);
    for (int eps : {1, 4})
      EXPECT_TRUE(same_up_to_renumbering(dbscan_labels(pts, 64, DbscanParams{eps, 3}), naive_dbscan(pts, eps, 3)));
  }
}

TEST(Dbscan, EmptyInput) {
  const ClusterResult r = dbscan({}, DbscanParams{1, 3});
  EXPECT_TRUE(r.clusters.empty());
  EXPECT_TRUE(r.noise.empty());
}

TEST(Dbscan, IdenticalPointsFormOneCluster) {
  const std::vector<Message> pts(12, Message::from_string("1011"));
  const ClusterResult r = dbscan(pts, DbscanParams{0, 12});
  ASSERT_EQ(r.clusters.size(), 1u);
  EXPECT_EQ(r.clusters[0].members.size(), 12u);
  EXPECT_EQ(r.clusters[0].centroid.to_string(), "1011");
}

TEST(Dbscan, OutlierIsNoise) {
  std::vector<Message> pts(5, Message::from_string("0000"));
  pts.push_back(Message::from_string("1111"));
  const ClusterResult r = dbscan(pts, DbscanParams{1, 3});
  ASSERT_EQ(r.clusters.size(), 1u);
  EXPECT_EQ(r.clusters[0].members, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(r.noise, (std::vector<std::size_t>{5}));
}

TEST(Dbscan, ResultPartitionsInputAndRespectsBounds) {
  CounterRng rng(33);
  for (int t = 0; t < 50; ++t) {
    const int n_bits = 12;
    const auto pts = random_points(rng, n_bits, 400);
    const std::int64_t ms = rng.uniform_int(1, 40);
    const ClusterResult r = dbscan(as_messages(pts, n_bits), DbscanParams{1, ms});
    std::vector<int> seen(pts.size(), 0);
    for (const auto& c : r.clusters) {
      EXPECT_GE(c.members.size(), 1u);
      EXPECT_EQ(c.centroid.size(), n_bits);
      for (auto p : c.members) ++seen[p];
    }
    for (auto p : r.noise) ++seen[p];
    for (int s : seen) EXPECT_EQ(s, 1);
    EXPECT_LE(static_cast<std::int64_t>(r.clusters.size()), static_cast<std::int64_t>(pts.size()) / ms);
    for (std::size_t i = 1; i < r.clusters.size(); ++i) {
      const auto& a = r.clusters[i - 1];
      const auto& b = r.clusters[i];
      EXPECT_TRUE(a.members.size() > b.members.size() ||
                  (a.members.size() == b.members.size() && a.centroid.packed() < b.centroid.packed()));
    }
  }
}

TEST(Dbscan, PermutationChangesOnlyNumbering) {
  CounterRng rng(5);
  std::vector<std::uint64_t> centers{0x0000, 0x0fff, 0xf0f0};
  std::vector<std::uint64_t> pts;
  for (int i = 0; i < 300; ++i) {
    std::uint64_t w = centers[i % 3];
    if (rng.bernoulli(0.5)) w ^= 1ull << rng.uniform_int(0, 15);
    pts.push_back(w);
  }
  const auto base = dbscan_labels(pts, 16, DbscanParams{1, 5});
  std::vector<std::size_t> perm(pts.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (int t = 0; t < 5; ++t) {
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(0, static_cast<std::int64_t>(i))]);
    std::vector<std::uint64_t> shuffled(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) shuffled[i] = pts[perm[i]];
    const auto lab = dbscan_labels(shuffled, 16, DbscanParams{1, 5});
    std::vector<int> back(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) back[perm[i]] = lab[i];
    EXPECT_TRUE(same_up_to_renumbering(back, base));
  }
  EXPECT_EQ(dbscan_labels(pts, 16, DbscanParams{1, 5}), base);
}

TEST(Dbscan, RaisingMinSamplesNeverShrinksNoise) {
  CounterRng rng(8);
  for (int t = 0; t < 30; ++t) {
    const auto pts = random_points(rng, 10, 300);
    std::vector<int> prev(pts.size(), 0);
    for (std::int64_t ms : {1, 2, 5, 10, 30, 100, 301}) {
      const auto lab = dbscan_labels(pts, 10, DbscanParams{1, ms});
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (prev[i]) EXPECT_EQ(lab[i], -1);
        prev[i] = lab[i] == -1;
      }
    }
  }
}

TEST(Dbscan, InvalidParams) {
  EXPECT_THROW(DbscanParams({-1, 3}).validate(), ParamError);
  EXPECT_THROW(DbscanParams({1, 0}).validate(), ParamError);
  EXPECT_THROW(dbscan({Message(3), Message(4)}, DbscanParams{1, 1}), DataError);
}

TEST(Centroid, MajorityExamples) {
  EXPECT_EQ(centroid({Message::from_string("10"), Message::from_string("10"), Message::from_string("01")}).to_string(), "10");
  EXPECT_EQ(centroid({Message::from_string("10"), Message::from_string("01")}).to_string(), "00");
  EXPECT_EQ(centroid(std::vector<Message>(3, Message::from_string("110"))).to_string(), "110");
  EXPECT_THROW(centroid({}), DataError);
}

TEST(Centroid, MedoidIsMemberWithSmallestTieBreak) {
  const std::vector<Message> m{Message::from_string("11"), Message::from_string("00")};
  EXPECT_EQ(centroid(m, CentroidRule::medoid).to_string(), "00");
  const std::vector<Message> k{Message::from_string("110"), Message::from_string("111"), Message::from_string("011")};
  EXPECT_EQ(centroid(k, CentroidRule::medoid).to_string(), "111");
}

TEST(BinarizeMessages, SelectionAndStrictBits) {
  ExtractorOutput o;
  o.det = Raster(1, 3);
  o.det.data = {0.9, 0.5, 0.2};
  for (double v : {0.9, 0.5, 0.1}) o.dec.push_back(Raster(1, 3, v));
  const auto pm = binarize_messages(o, 0.5);
  ASSERT_EQ(pm.size(), 1u);
  EXPECT_EQ(pm[0].pixel, 0u);
  EXPECT_EQ(pm[0].msg.to_string(), "100");
  EXPECT_TRUE(binarize_messages(o, 0.95).empty());
}

TEST(BinarizeMessages, CountMatchesBruteForce) {
  CounterRng rng(4);
  ExtractorOutput o;
  o.det = Raster(17, 19);
  for (double& v : o.det.data) v = rng.uniform();
  o.dec.assign(4, Raster(17, 19, 0.7));
  std::size_t n = 0;
  for (double v : o.det.data) n += v > 0.4;
  EXPECT_EQ(binarize_messages(o, 0.4).size(), n);
}

TEST(DecodeMulti, TwoRegionsTwoClusters) {
  const int h = 64, w = 64, nb = 32;
  const Message a = Message::from_hex("00000000", nb), b = Message::from_hex("0000ffff", nb);
  ASSERT_EQ(hamming(a, b), 16);
  ExtractorOutput o;
  o.det = Raster(h, w, 0.0);
  o.dec.assign(nb, Raster(h, w, 0.2));
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      const bool left = j < 24, right = j >= 40;
      if (!left && !right) continue;
      o.det.at(i, j) = 0.9;
      const Message& m = left ? a : b;
      for (int k = 0; k < nb; ++k) o.dec[k].at(i, j) = m[k] ? 0.8 : 0.2;
    }
  const ClusterResult r = decode_multi(o, 0.5, DbscanParams{1, 1000});
  ASSERT_EQ(r.clusters.size(), 2u);
  EXPECT_EQ(r.clusters[0].members.size(), 64u * 24);
  EXPECT_EQ(r.clusters[0].centroid, a);
  EXPECT_EQ(r.clusters[1].centroid, b);
  const Raster codes = assignment_codes(r, h, w);
  EXPECT_EQ(codes.at(0, 0), 0.0);
  EXPECT_EQ(codes.at(0, 63), 1.0);
  EXPECT_EQ(codes.at(0, 30), 254.0);
}

TEST(DecodeMulti, NoiseCodedAs255) {
  ExtractorOutput o;
  o.det = Raster(1, 4, 0.9);
  o.dec.assign(4, Raster(1, 4, 0.2));
  o.dec[0].at(0, 3) = 0.9;
  o.dec[1].at(0, 3) = 0.9;
  o.dec[2].at(0, 3) = 0.9;
  const ClusterResult r = decode_multi(o, 0.5, DbscanParams{1, 3});
  ASSERT_EQ(r.clusters.size(), 1u);
  EXPECT_EQ(assignment_codes(r, 1, 4).at(0, 3), 255.0);
}
