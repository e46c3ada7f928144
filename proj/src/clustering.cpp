#include "wmseg/clustering.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "wmseg/error.hpp"

namespace wmseg {

void DbscanParams::validate() const {
  if (epsilon < 0) throw ParamError("dbscan epsilon must be >= 0");
  if (min_samples < 1) throw ParamError("dbscan min_samples must be >= 1");
}

std::vector<PixelMessage> binarize_messages(const ExtractorOutput& out, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ParamError("threshold must be in [0,1]");
  std::vector<PixelMessage> pts;
  const int n_bits = out.n_bits();
  for (std::size_t p = 0; p < out.det.size(); ++p) {
    if (!(out.det.data[p] > tau)) continue;
    Message m(n_bits);
    for (int k = 0; k < n_bits; ++k) m.set(k, out.dec[k].data[p] > 0.5);
    pts.push_back({p, std::move(m)});
  }
  return pts;
}

namespace {

double binomial_sum(int n, int e) {
  double total = 0.0, c = 1.0;
  for (int k = 0; k <= std::min(e, n); ++k) {
    total += c;
    c = c * (n - k) / (k + 1);
  }
  return total;
}

class WordIndex {
 public:
  WordIndex(const std::vector<std::uint64_t>& words, int n_bits, int epsilon)
      : n_bits_(n_bits), epsilon_(epsilon) {
    point_word_.resize(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
      auto [it, inserted] = id_.try_emplace(words[i], static_cast<int>(distinct_.size()));
      if (inserted) {
        distinct_.push_back(words[i]);
        weight_.push_back(0);
      }
      ++weight_[it->second];
      point_word_[i] = it->second;
    }
    enumerate_ = binomial_sum(n_bits, epsilon) <= static_cast<double>(distinct_.size());
  }

  int size() const { return static_cast<int>(distinct_.size()); }
  std::int64_t weight(int id) const { return weight_[id]; }
  int word_of(std::size_t point) const { return point_word_[point]; }

  // Distinct-word neighbourhood within epsilon, including the word itself.
  void neighbours(int id, std::vector<int>& out) const {
    out.clear();
    if (enumerate_) {
      out.push_back(id);
      if (epsilon_ > 0) flips(distinct_[id], 0, epsilon_, out);
    } else {
      const std::uint64_t w = distinct_[id];
      for (int o = 0; o < size(); ++o)
        if (std::popcount(w ^ distinct_[o]) <= epsilon_) out.push_back(o);
    }
  }

 private:
  void flips(std::uint64_t w, int from, int left, std::vector<int>& out) const {
    for (int b = from; b < n_bits_; ++b) {
      const std::uint64_t v = w ^ (std::uint64_t{1} << b);
      if (auto it = id_.find(v); it != id_.end()) out.push_back(it->second);
      if (left > 1) flips(v, b + 1, left - 1, out);
    }
  }

  int n_bits_;
  int epsilon_;
  bool enumerate_ = false;
  std::unordered_map<std::uint64_t, int> id_;
  std::vector<std::uint64_t> distinct_;
  std::vector<std::int64_t> weight_;
  std::vector<int> point_word_;
};

}  // namespace

std::vector<int> dbscan_labels(const std::vector<std::uint64_t>& words, int n_bits, const DbscanParams& params) {
  params.validate();
  if (n_bits < 0 || n_bits > kMaxBits) throw ParamError("dbscan supports at most 64-bit words");
  const WordIndex index(words, n_bits, params.epsilon);
  const int d = index.size();

  std::vector<int> nb;
  std::vector<char> core(d);
  for (int id = 0; id < d; ++id) {
    index.neighbours(id, nb);
    std::int64_t total = 0;
    for (int o : nb) total += index.weight(o);
    core[id] = total >= params.min_samples;
  }

  constexpr int kUnvisited = -2, kNoise = -1;
  std::vector<int> label(d, kUnvisited);
  int next = 0;
  std::deque<int> queue;
  // Distinct words are numbered by first occurrence, so this visits points in ascending order.
  for (int id = 0; id < d; ++id) {
    if (label[id] != kUnvisited) continue;
    if (!core[id]) {
      label[id] = kNoise;
      continue;
    }
    const int c = next++;
    label[id] = c;
    index.neighbours(id, nb);
    queue.assign(nb.begin(), nb.end());
    while (!queue.empty()) {
      const int q = queue.front();
      queue.pop_front();
      if (label[q] == kNoise) label[q] = c;
      if (label[q] != kUnvisited) continue;
      label[q] = c;
      if (core[q]) {
        index.neighbours(q, nb);
        queue.insert(queue.end(), nb.begin(), nb.end());
      }
    }
  }

  std::vector<int> out(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) out[i] = label[index.word_of(i)];
  return out;
}

Message centroid(const std::vector<Message>& members, CentroidRule rule) {
  if (members.empty()) throw DataError("centroid of an empty cluster");
  const int n = members[0].size();
  for (const auto& m : members)
    if (m.size() != n) throw DataError("message length mismatch");
  if (rule == CentroidRule::majority) {
    Message out(n);
    for (int k = 0; k < n; ++k) {
      std::size_t ones = 0;
      for (const auto& m : members) ones += m[k];
      out.set(k, 2 * ones > members.size());
    }
    return out;
  }
  // Medoid over distinct members weighted by multiplicity; ties go to the smallest bit string.
  std::vector<std::pair<std::vector<std::uint8_t>, std::size_t>> distinct;
  {
    std::vector<std::vector<std::uint8_t>> all;
    all.reserve(members.size());
    for (const auto& m : members) all.push_back(m.bits());
    std::sort(all.begin(), all.end());
    for (auto& b : all) {
      if (!distinct.empty() && distinct.back().first == b) ++distinct.back().second;
      else distinct.emplace_back(std::move(b), 1);
    }
  }
  std::size_t best = 0;
  std::uint64_t best_cost = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t a = 0; a < distinct.size(); ++a) {
    std::uint64_t cost = 0;
    for (std::size_t b = 0; b < distinct.size(); ++b) {
      std::uint64_t dist = 0;
      for (int k = 0; k < n; ++k) dist += distinct[a].first[k] != distinct[b].first[k];
      cost += dist * distinct[b].second;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = a;
    }
  }
  return Message(distinct[best].first);
}

namespace {

ClusterResult assemble(const std::vector<Message>& points, const std::vector<std::size_t>& ids,
                       const std::vector<int>& labels, CentroidRule rule) {
  ClusterResult res;
  const int n_clusters = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::vector<std::size_t>> members(std::max(n_clusters, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) res.noise.push_back(ids[i]);
    else members[labels[i]].push_back(i);
  }
  for (auto& mem : members) {
    std::vector<Message> msgs;
    msgs.reserve(mem.size());
    for (std::size_t i : mem) msgs.push_back(points[i]);
    Cluster c;
    c.centroid = centroid(msgs, rule);
    for (std::size_t i : mem) c.members.push_back(ids[i]);
    res.clusters.push_back(std::move(c));
  }
  std::stable_sort(res.clusters.begin(), res.clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
    return a.centroid.bits() < b.centroid.bits();
  });
  return res;
}

}  // namespace

ClusterResult dbscan(const std::vector<Message>& points, const DbscanParams& params, CentroidRule rule) {
  params.validate();
  if (points.empty()) return {};
  const int n = points[0].size();
  std::vector<std::uint64_t> words(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != n) throw DataError("message length mismatch");
    words[i] = points[i].packed();
  }
  std::vector<std::size_t> ids(points.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  return assemble(points, ids, dbscan_labels(words, n, params), rule);
}

ClusterResult decode_multi(const ExtractorOutput& out, double tau, const DbscanParams& params, CentroidRule rule) {
  params.validate();
  auto pts = binarize_messages(out, tau);
  std::vector<Message> msgs;
  std::vector<std::size_t> ids;
  std::vector<std::uint64_t> words;
  msgs.reserve(pts.size());
  for (auto& p : pts) {
    ids.push_back(p.pixel);
    words.push_back(p.msg.packed());
    msgs.push_back(std::move(p.msg));
  }
  return assemble(msgs, ids, dbscan_labels(words, out.n_bits(), params), rule);
}

Raster assignment_codes(const ClusterResult& result, int height, int width) {
  Raster codes(height, width, 254.0);
  for (std::size_t p : result.noise) codes.data[p] = 255.0;
  for (std::size_t c = 0; c < result.clusters.size(); ++c)
    for (std::size_t p : result.clusters[c].members) codes.data[p] = static_cast<double>(std::min<std::size_t>(c, 253));
  return codes;
}

}  // namespace wmseg
