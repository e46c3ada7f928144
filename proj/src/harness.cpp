#include "wmseg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "wmseg/error.hpp"
#include "wmseg/filter.hpp"
#include "wmseg/metrics.hpp"
#include "wmseg/raster_io.hpp"

namespace wmseg {

Protocol parse_protocol(const std::string& name) {
  if (name == "localization") return Protocol::localization;
  if (name == "multiwm") return Protocol::multiwm;
  if (name == "robustness") return Protocol::robustness;
  if (name == "dbscan_grid") return Protocol::dbscan_grid;
  throw ParamError("unknown protocol: " + name);
}

std::string protocol_name(Protocol p) {
  switch (p) {
    case Protocol::localization: return "localization";
    case Protocol::multiwm: return "multiwm";
    case Protocol::robustness: return "robustness";
    case Protocol::dbscan_grid: return "dbscan_grid";
  }
  return "unknown";
}

CodecSettings CodecSettings::for_key(const WatermarkKey& key) {
  CodecSettings s;
  s.embed.key = key;
  s.extract.key = key;
  return s;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

MaskMap centered_rect(int h, int w, double fraction) {
  if (!(fraction > 0 && fraction <= 1)) throw ParamError("area fraction must be in (0,1]");
  const double s = std::sqrt(fraction);
  const int rh = static_cast<int>(std::floor(s * h + 1e-9)), rw = static_cast<int>(std::floor(s * w + 1e-9));
  return rect_mask(h, w, (h - rh) / 2, (w - rw) / 2, rh, rw);
}

std::vector<MaskMap> checkerboard_masks(int k) {
  if (k < 1 || k > 5) throw ParamError("number of messages must be in [1,5]");
  const int side = static_cast<int>(std::floor(256 * std::sqrt(0.1)));
  std::vector<MaskMap> out;
  for (int q = 0; q < k; ++q) {
    MaskMap m = rect_mask(256, 256, kCheckerAnchors[q][0] - side / 2, kCheckerAnchors[q][1] - side / 2, side, side);
    for (auto& prev : out)
      for (std::size_t p = 0; p < m.size(); ++p)
        if (m.data[p] > 0.5) prev.data[p] = 0.0;
    out.push_back(std::move(m));
  }
  return out;
}

MaskMap transform_mask(const MaskMap& mask, const std::vector<AugmentSpec>& chain) {
  MaskMap cur = mask;
  for (const auto& spec : chain) {
    if (!is_geometric(spec.kind)) continue;
    const ImageBuffer dummy(cur.height, cur.width);
    cur = *apply(dummy, &cur, spec).mask;
  }
  return cur;
}

namespace {

std::string dump_path(const HarnessOptions& opt, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(opt.dump_dir, ec);
  return opt.dump_dir + "/" + name + ".pgm";
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void describe_codec(EvalReport& r, const CodecSettings& c, const HarnessOptions& opt) {
  r.param("alpha_jnd", fmt(c.embed.alpha_jnd));
  r.param("n_bits", std::to_string(c.embed.key.n_bits));
  r.param("tile", std::to_string(c.embed.key.tile));
  r.param("window", std::to_string(c.extract.window));
  r.param("tau", fmt(opt.tau));
}

// Bit accuracy of decode_single, or 0.5 when no pixel passes tau.
double decode_accuracy(const ExtractorOutput& out, double tau, const Message& truth, bool& undecodable) {
  try {
    undecodable = false;
    return bit_accuracy(decode_single(out, tau), truth);
  } catch (const NoWatermarkedPixels&) {
    undecodable = true;
    return 0.5;
  }
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

EvalReport run_localization(const std::vector<ImageBuffer>& corpus, const CodecSettings& codec,
                            const std::vector<double>& fractions, bool with_crop, const HarnessOptions& opt) {
  if (corpus.empty()) throw DataError("empty corpus");
  if (fractions.empty()) throw ParamError("no area fractions given");
  EvalReport rep;
  rep.protocol = "localization";
  rep.corpus_id = corpus_hash(corpus);
  rep.corpus_size = corpus.size();
  rep.seed = opt.seed;
  describe_codec(rep, codec, opt);
  rep.param("with_crop", with_crop ? "true" : "false");

  const std::size_t nf = fractions.size(), n = corpus.size();
  std::vector<double> miou_v(nf * n), acc_v(nf * n), psnr_v(nf * n);
  std::vector<char> undec(nf * n);
  parallel_for(nf * n, opt.jobs, [&](std::size_t t) {
    const std::size_t fi = t / n, ii = t % n;
    const ImageBuffer& img = corpus[ii];
    CounterRng rng(opt.seed, 0x6c6f6300 + ii);
    const Message msg = Message::random(codec.embed.key.n_bits, rng);
    const MaskMap gt = centered_rect(img.height, img.width, fractions[fi]);
    const ImageBuffer wm = embed(img, msg, gt, codec.embed);
    psnr_v[t] = psnr(wm, img);
    ImageBuffer view = wm;
    MaskMap view_gt = gt;
    if (with_crop) {
      const int hh = std::max(1, img.height / 2), hw = std::max(1, img.width / 2);
      ImageBuffer c(hh, hw);
      MaskMap cm(hh, hw);
      for (int i = 0; i < hh; ++i)
        for (int j = 0; j < hw; ++j) {
          for (int ch = 0; ch < 3; ++ch) c.at(ch, i, j) = wm.at(ch, i, j);
          cm.at(i, j) = gt.at(i, j);
        }
      view = resize_bilinear(c, img.height, img.width);
      view_gt = binarize(resize_bilinear(cm, img.height, img.width));
    }
    const ExtractorOutput out = extract(view, codec.extract);
    const MaskMap pred = localize(out, opt.tau);
    miou_v[t] = miou(pred, view_gt);
    if (!opt.dump_dir.empty())
      save_mask(pred, dump_path(opt, "localization_f" + std::to_string(fi) + "_" + std::to_string(ii)));
    bool u = false;
    acc_v[t] = decode_accuracy(out, opt.tau, msg, u);
    undec[t] = u;
  });
  for (std::size_t fi = 0; fi < nf; ++fi) {
    ReportRow row;
    row.label = "fraction:" + fmt(fractions[fi]) + (with_crop ? "+crop" : "");
    std::vector<double> m(miou_v.begin() + fi * n, miou_v.begin() + (fi + 1) * n);
    std::vector<double> a(acc_v.begin() + fi * n, acc_v.begin() + (fi + 1) * n);
    std::vector<double> p(psnr_v.begin() + fi * n, psnr_v.begin() + (fi + 1) * n);
    row.set("fraction", fractions[fi]);
    row.set("miou", mean(m));
    row.set("bit_acc", mean(a));
    row.set("undecodable", static_cast<double>(std::count(undec.begin() + fi * n, undec.begin() + (fi + 1) * n, 1)));
    row.set("psnr", mean(p));
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

namespace {

struct MultiwmImage {
  ExtractorOutput out;
  std::vector<MaskMap> masks;  // after the chain
  std::vector<Message> msgs;
  MaskMap union_gt;
};

MultiwmImage multiwm_image(const ImageBuffer& img, std::size_t index, const CodecSettings& codec, int k,
                           const std::vector<AugmentSpec>& chain, const HarnessOptions& opt) {
  if (img.height != 256 || img.width != 256) throw DataError("multi-watermark protocol needs 256x256 images");
  MultiwmImage r;
  CounterRng rng(opt.seed, 0x6d756c00 + index);
  const auto masks = checkerboard_masks(k);
  for (std::size_t a = 0; a < masks.size(); ++a)
    for (std::size_t b = a + 1; b < masks.size(); ++b)
      for (std::size_t p = 0; p < masks[a].size(); ++p)
        if (masks[a].data[p] > 0.5 && masks[b].data[p] > 0.5) throw DataError("checkerboard squares overlap");
  ImageBuffer x = img;
  for (const auto& m : masks) {
    r.msgs.push_back(Message::random(codec.embed.key.n_bits, rng));
    x = embed(x, r.msgs.back(), m, codec.embed);
  }
  MaskMap uni(256, 256);
  for (const auto& m : masks)
    for (std::size_t p = 0; p < m.size(); ++p)
      if (m.data[p] > 0.5) uni.data[p] = 1.0;
  const AugResult aug = apply_chain(x, &uni, chain, &img);
  r.union_gt = *aug.mask;
  for (const auto& m : masks) r.masks.push_back(transform_mask(m, chain));
  r.out = extract(aug.image, codec.extract);
  return r;
}

struct ClusterScore {
  std::size_t clusters = 0;
  double acc_sum = 0.0;
};

ClusterScore score_clusters(const ClusterResult& res, const MultiwmImage& mi) {
  ClusterScore s;
  s.clusters = res.clusters.size();
  for (const auto& c : res.clusters) {
    std::vector<std::size_t> overlap(mi.masks.size(), 0);
    for (std::size_t p : c.members)
      for (std::size_t q = 0; q < mi.masks.size(); ++q)
        if (p < mi.masks[q].size() && mi.masks[q].data[p] > 0.5) ++overlap[q];
    const std::size_t best = static_cast<std::size_t>(std::max_element(overlap.begin(), overlap.end()) - overlap.begin());
    s.acc_sum += bit_accuracy(c.centroid, mi.msgs[best]);
  }
  return s;
}

}  // namespace

EvalReport run_multiwm(const std::vector<ImageBuffer>& corpus, const CodecSettings& codec, int n_messages,
                       const std::vector<AugmentSpec>& chain, const DbscanParams& dbscan, const HarnessOptions& opt,
                       MultiwmResult* summary) {
  if (corpus.empty()) throw DataError("empty corpus");
  dbscan.validate();
  EvalReport rep;
  rep.protocol = "multiwm";
  rep.corpus_id = corpus_hash(corpus);
  rep.corpus_size = corpus.size();
  rep.seed = opt.seed;
  describe_codec(rep, codec, opt);
  rep.param("n_messages", std::to_string(n_messages));
  rep.param("chain", chain_label(chain));
  rep.param("epsilon", std::to_string(dbscan.epsilon));
  rep.param("min_samples", std::to_string(dbscan.min_samples));

  const std::size_t n = corpus.size();
  std::vector<ClusterScore> scores(n);
  std::vector<double> mious(n);
  parallel_for(n, opt.jobs, [&](std::size_t i) {
    const MultiwmImage mi = multiwm_image(corpus[i], i, codec, n_messages, chain, opt);
    const ClusterResult res = decode_multi(mi.out, opt.tau, dbscan);
    scores[i] = score_clusters(res, mi);
    const MaskMap pred = localize(mi.out, opt.tau);
    mious[i] = miou(pred, mi.union_gt);
    if (!opt.dump_dir.empty()) {
      save_mask(pred, dump_path(opt, "multiwm_" + std::to_string(i) + "_mask"));
      save_codes(assignment_codes(res, mi.out.height(), mi.out.width()),
                 dump_path(opt, "multiwm_" + std::to_string(i) + "_assign"));
    }
  });

  MultiwmResult s;
  s.images = n;
  double acc = 0.0, cl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s.exact_k += scores[i].clusters == static_cast<std::size_t>(n_messages);
    cl += static_cast<double>(scores[i].clusters);
    acc += scores[i].acc_sum;
    s.clusters_scored += scores[i].clusters;
    s.miou_min = std::min(s.miou_min, mious[i]);
  }
  s.mean_clusters = cl / static_cast<double>(n);
  s.bit_accuracy = s.clusters_scored ? acc / static_cast<double>(s.clusters_scored) : std::numeric_limits<double>::quiet_NaN();
  s.miou_mean = mean(mious);
  if (summary) *summary = s;

  ReportRow row;
  row.label = chain_label(chain);
  row.set("images", static_cast<double>(n));
  row.set("exact_k_rate", static_cast<double>(s.exact_k) / static_cast<double>(n));
  row.set("mean_clusters", s.mean_clusters);
  row.set("bit_acc", s.bit_accuracy);
  row.set("miou", s.miou_mean);
  row.set("miou_min", s.miou_min);
  rep.rows.push_back(std::move(row));
  return rep;
}

std::vector<std::vector<AugmentSpec>> default_robustness_augs(std::uint64_t seed) {
  const char* rows[] = {
      "identity",          "crop:0.33",          "crop:0.5",         "resize:0.5",     "rotate:10",
      "rotate:-10",        "perspective:0.1",    "perspective:0.5",  "hflip",          "brightness:1.5",
      "brightness:2",      "contrast:1.5",       "contrast:2",       "hue:-0.1",       "hue:0.1",
      "saturation:1.5",    "saturation:2",       "median_filter:3",  "median_filter:7", "gaussian_blur:3",
      "gaussian_blur:17",  "jpeg:50",            "jpeg:80",          "splice_proportion:0.1",
      "splice_collage:0.1", "combination",
  };
  std::vector<std::vector<AugmentSpec>> out;
  for (const char* r : rows) out.push_back(parse_chain(r, seed));
  return out;
}

EvalReport run_robustness(const std::vector<ImageBuffer>& positives, const std::vector<ImageBuffer>& negatives,
                          const CodecSettings& codec, const std::vector<std::vector<AugmentSpec>>& augs,
                          const HarnessOptions& opt) {
  if (positives.empty() && negatives.empty()) throw DataError("empty corpus");
  EvalReport rep;
  rep.protocol = "robustness";
  std::vector<ImageBuffer> all = positives;
  all.insert(all.end(), negatives.begin(), negatives.end());
  rep.corpus_id = corpus_hash(all);
  rep.corpus_size = all.size();
  rep.seed = opt.seed;
  describe_codec(rep, codec, opt);
  rep.param("tau_image", fmt(opt.tau_image));
  rep.param("positives", std::to_string(positives.size()));
  rep.param("negatives", std::to_string(negatives.size()));
  if (positives.empty()) rep.notes.push_back("no positives: TPR and bit accuracy undefined");
  if (negatives.empty()) rep.notes.push_back("no negatives: FPR undefined");

  const std::size_t np = positives.size(), nn = negatives.size();
  std::vector<Message> msgs(np);
  std::vector<ImageBuffer> wm(np);
  std::vector<double> psnrs(np);
  parallel_for(np, opt.jobs, [&](std::size_t i) {
    CounterRng rng(opt.seed, 0x726f6200 + i);
    msgs[i] = Message::random(codec.embed.key.n_bits, rng);
    wm[i] = embed(positives[i], msgs[i], MaskMap(positives[i].height, positives[i].width, 1.0), codec.embed);
    psnrs[i] = psnr(wm[i], positives[i]);
  });

  for (const auto& chain : augs) {
    std::vector<char> flag_pos(np), flag_neg(nn), undec(np);
    std::vector<double> acc(np);
    parallel_for(np + nn, opt.jobs, [&](std::size_t t) {
      if (t < np) {
        const ImageBuffer* bg = &positives[t];
        if (!chain.empty() && chain.front().kind == AugKind::splice_collage) bg = &positives[(t + 1) % np];
        const ExtractorOutput out = extract(apply_chain(wm[t], nullptr, chain, bg).image, codec.extract);
        flag_pos[t] = detect_image(out, opt.tau, opt.tau_image).flagged;
        bool u = false;
        acc[t] = decode_accuracy(out, opt.tau, msgs[t], u);
        undec[t] = u;
      } else {
        const std::size_t i = t - np;
        const ImageBuffer* bg = &negatives[i];
        if (!chain.empty() && chain.front().kind == AugKind::splice_collage) bg = &negatives[(i + 1) % nn];
        const ExtractorOutput out = extract(apply_chain(negatives[i], nullptr, chain, bg).image, codec.extract);
        flag_neg[i] = detect_image(out, opt.tau, opt.tau_image).flagged;
      }
    });
    ReportRow row;
    row.label = chain_label(chain);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.set("tpr", np ? static_cast<double>(std::count(flag_pos.begin(), flag_pos.end(), 1)) / np : nan);
    row.set("fpr", nn ? static_cast<double>(std::count(flag_neg.begin(), flag_neg.end(), 1)) / nn : nan);
    row.set("bit_acc", mean(acc));
    row.set("undecodable", static_cast<double>(std::count(undec.begin(), undec.end(), 1)));
    row.set("psnr", mean(psnrs));
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

EvalReport run_dbscan_grid(const std::vector<ImageBuffer>& corpus, const CodecSettings& codec,
                           const std::vector<int>& eps_list, const std::vector<std::int64_t>& min_samples_list,
                           const std::vector<AugmentSpec>& chain, const HarnessOptions& opt) {
  if (corpus.empty()) throw DataError("empty corpus");
  if (eps_list.empty() || min_samples_list.empty()) throw ParamError("empty DBSCAN grid");
  EvalReport rep;
  rep.protocol = "dbscan_grid";
  rep.corpus_id = corpus_hash(corpus);
  rep.corpus_size = corpus.size();
  rep.seed = opt.seed;
  describe_codec(rep, codec, opt);
  rep.param("n_messages", "5");
  rep.param("chain", chain_label(chain));

  const std::size_t n = corpus.size(), ne = eps_list.size(), nm = min_samples_list.size();
  std::vector<ClusterScore> scores(n * ne * nm);
  std::vector<double> mious(n);
  parallel_for(n, opt.jobs, [&](std::size_t i) {
    const MultiwmImage mi = multiwm_image(corpus[i], i, codec, 5, chain, opt);
    mious[i] = miou(localize(mi.out, opt.tau), mi.union_gt);
    for (std::size_t e = 0; e < ne; ++e)
      for (std::size_t m = 0; m < nm; ++m) {
        DbscanParams p{eps_list[e], min_samples_list[m]};
        scores[(e * nm + m) * n + i] = score_clusters(decode_multi(mi.out, opt.tau, p), mi);
      }
  });
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t m = 0; m < nm; ++m) {
      double acc = 0.0, cl = 0.0;
      std::size_t exact = 0, scored = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& s = scores[(e * nm + m) * n + i];
        acc += s.acc_sum;
        cl += static_cast<double>(s.clusters);
        scored += s.clusters;
        exact += s.clusters == 5;
      }
      ReportRow row;
      row.label = "eps:" + std::to_string(eps_list[e]) + ",min_samples:" + std::to_string(min_samples_list[m]);
      row.set("epsilon", eps_list[e]);
      row.set("min_samples", static_cast<double>(min_samples_list[m]));
      row.set("mean_clusters", cl / static_cast<double>(n));
      row.set("exact_k_rate", static_cast<double>(exact) / static_cast<double>(n));
      row.set("bit_acc", scored ? acc / static_cast<double>(scored) : std::numeric_limits<double>::quiet_NaN());
      row.set("miou", mean(mious));
      row.set("selected", eps_list[e] == 1 && min_samples_list[m] == 1000 ? 1.0 : 0.0);
      rep.rows.push_back(std::move(row));
    }
  return rep;
}

double calibrate_on(const std::vector<ImageBuffer>& negatives, const ExtractConfig& cfg, double target_fpr, int jobs) {
  std::vector<std::vector<double>> parts(negatives.size());
  parallel_for(negatives.size(), jobs, [&](std::size_t i) { parts[i] = extract(negatives[i], cfg).det.data; });
  std::vector<double> pooled;
  for (auto& p : parts) pooled.insert(pooled.end(), p.begin(), p.end());
  return calibrate_tau_pooled(pooled, target_fpr);
}

}  // namespace wmseg
