#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wmseg/augment.hpp"
#include "wmseg/clustering.hpp"
#include "wmseg/codec.hpp"
#include "wmseg/corpus.hpp"
#include "wmseg/error.hpp"
#include "wmseg/harness.hpp"
#include "wmseg/jnd.hpp"
#include "wmseg/key.hpp"
#include "wmseg/maskgen.hpp"
#include "wmseg/metrics.hpp"
#include "wmseg/postproc.hpp"
#include "wmseg/raster_io.hpp"

using nlohmann::json;
using namespace wmseg;

namespace {

struct Globals {
  std::string key_path;
  double alpha = 2.0;
  double gamma = 0.3;
  double gain = 0.18;
  double tau = 0.5;
  double tau_image = kDefaultTauImage;
  int window = 16;
  int proc_h = 0;
  int proc_w = 0;
  int jobs = 0;
  std::uint64_t seed = 0;
  int epsilon = 1;
  std::int64_t min_samples = 1000;
  bool json_out = false;
};

WatermarkKey load_key(const Globals& g) {
  if (g.key_path.empty()) throw ParamError("--key is required");
  return read_key_file(g.key_path);
}

EmbedConfig embed_config(const Globals& g, const WatermarkKey& key) {
  EmbedConfig c;
  c.key = key;
  c.alpha_jnd = g.alpha;
  c.jnd_params.gamma = g.gamma;
  c.shaping.gain = g.gain;
  c.validate();
  return c;
}

ExtractConfig extract_config(const Globals& g, const WatermarkKey& key) {
  ExtractConfig c;
  c.key = key;
  c.window = g.window;
  c.jnd_params.gamma = g.gamma;
  c.proc_h = g.proc_h;
  c.proc_w = g.proc_w;
  c.validate();
  return c;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

json metric_or_null(double v) { return metric_json(v); }

// "synthetic:N" or a directory of images.
std::vector<ImageBuffer> load_eval_corpus(const std::string& spec, int size, std::uint64_t seed) {
  if (spec.rfind("synthetic:", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(spec.substr(10));
    } catch (const std::exception&) {
      throw ParamError("bad synthetic corpus size: " + spec);
    }
    if (n < 1) throw ParamError("synthetic corpus needs at least one image");
    return synthetic_corpus(n, size, seed);
  }
  auto c = load_corpus(spec, size);
  if (c.empty()) throw DataError("no images in " + spec);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localized image watermarking: embed, extract, localize, decode and evaluate"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");

  Globals g;
  app.add_option("--key", g.key_path, "Binary key file");
  app.add_option("--alpha", g.alpha, "JND strength alpha");
  app.add_option("--gamma", g.gamma, "JND masking overlap gamma");
  app.add_option("--gain", g.gain, "Carrier gain");
  app.add_option("--tau", g.tau, "Pixel threshold");
  app.add_option("--tau-image,--tau_image", g.tau_image, "Image-level threshold on s_det");
  app.add_option("--window", g.window, "Correlation window");
  app.add_option("--proc-h,--proc_h", g.proc_h, "Processing height (0 = native)");
  app.add_option("--proc-w,--proc_w", g.proc_w, "Processing width (0 = native)");
  app.add_option("--jobs", g.jobs, "Worker threads (0 = logical cores)");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--eps,--epsilon", g.epsilon, "DBSCAN epsilon (bits)");
  app.add_option("--min-samples,--min_samples", g.min_samples, "DBSCAN min_samples");
  app.add_flag("--json", g.json_out, "JSON output for every subcommand");

  // keygen
  auto* keygen = app.add_subcommand("keygen", "Create a key file");
  std::string kg_out;
  int kg_bits = 32, kg_tile = 8;
  bool kg_det = false;
  keygen->add_option("--out", kg_out)->required();
  keygen->add_option("--n-bits,--n_bits", kg_bits);
  keygen->add_option("--tile", kg_tile);
  keygen->add_flag("--deterministic", kg_det, "Derive the seed from --seed (tests only)");

  // embed
  auto* emb = app.add_subcommand("embed", "Embed a message");
  std::string em_in, em_out, em_msg, em_mask;
  emb->add_option("--in", em_in)->required();
  emb->add_option("--out", em_out)->required();
  emb->add_option("--msg", em_msg, "Hex message (random from --seed when omitted)");
  emb->add_option("--mask", em_mask, "Mask image (full image when omitted)");

  // extract
  auto* ext = app.add_subcommand("extract", "Write detection and decoding maps");
  std::string ex_in, ex_det, ex_dec;
  ext->add_option("--in", ex_in)->required();
  ext->add_option("--out-det,--out_det", ex_det);
  ext->add_option("--out-dec,--out_dec", ex_dec);

  auto* det = app.add_subcommand("detect", "Image-level detection");
  std::string dt_in;
  det->add_option("--in", dt_in)->required();

  auto* dec = app.add_subcommand("decode", "Decode a single message");
  std::string dc_in;
  dec->add_option("--in", dc_in)->required();

  auto* dmul = app.add_subcommand("decode-multi", "Decode several messages by clustering");
  std::string dm_in, dm_assign, dm_rule = "majority";
  dmul->add_option("--in", dm_in)->required();
  dmul->add_option("--out-assign,--out_assign", dm_assign);
  dmul->add_option("--centroid", dm_rule)->check(CLI::IsMember({"majority", "medoid"}));

  auto* loc = app.add_subcommand("locate", "Write the predicted watermark mask");
  std::string lc_in, lc_out;
  loc->add_option("--in", lc_in)->required();
  loc->add_option("--out", lc_out);

  auto* jnd = app.add_subcommand("jnd-map", "Write the JND heatmap");
  std::string jn_in, jn_out;
  jnd->add_option("--in", jn_in)->required();
  jnd->add_option("--out", jn_out)->required();

  auto* gm = app.add_subcommand("gen-mask", "Sample a training mask");
  std::string gm_kind = "box", gm_out;
  int gm_h = 256, gm_w = 256;
  double gm_invert = 0.0;
  std::vector<std::string> gm_external;
  gm->add_option("--kind", gm_kind)->check(CLI::IsMember({"box", "full", "irregular", "external"}));
  gm->add_option("--out", gm_out)->required();
  gm->add_option("--height", gm_h);
  gm->add_option("--width", gm_w);
  gm->add_option("--invert-prob,--invert_prob", gm_invert);
  gm->add_option("--external", gm_external, "Mask files for the external kind");

  auto* aug = app.add_subcommand("augment", "Apply a transform or a chain");
  std::string ag_in, ag_out, ag_op, ag_chain, ag_mask, ag_out_mask, ag_bg;
  std::optional<double> ag_param;
  aug->add_option("--in", ag_in)->required();
  aug->add_option("--out", ag_out)->required();
  aug->add_option("--op", ag_op);
  aug->add_option("--param", ag_param);
  aug->add_option("--chain", ag_chain);
  aug->add_option("--mask", ag_mask);
  aug->add_option("--out-mask,--out_mask", ag_out_mask);
  aug->add_option("--background", ag_bg, "Background image for splice kinds");

  auto* cal = app.add_subcommand("calibrate", "Calibrate tau on negative images");
  std::string cl_dir, cl_out;
  double cl_fpr = 1e-3;
  int cl_size = 0;
  cal->add_option("--dir", cl_dir)->required();
  cal->add_option("--out", cl_out, "Config file receiving tau");
  cal->add_option("--fpr", cl_fpr);
  cal->add_option("--size", cl_size, "Resize images to size x size (0 = native)");

  auto* ev = app.add_subcommand("eval", "Run an evaluation protocol");
  std::string ev_protocol, ev_corpus = "synthetic:20", ev_out, ev_csv, ev_chain, ev_augs = "default", ev_neg, ev_dump;
  std::string ev_fractions = "0.1,0.25,0.5,0.75,1.0", ev_eps = "0,1,2", ev_min = "100,500,1000,2000";
  int ev_size = 256, ev_k = 5;
  double ev_split = 0.5;
  bool ev_crop = false;
  ev->add_option("--protocol", ev_protocol)
      ->required()
      ->check(CLI::IsMember({"localization", "multiwm", "robustness", "dbscan_grid"}));
  ev->add_option("--corpus", ev_corpus, "Image directory or synthetic:N");
  ev->add_option("--size", ev_size, "Processing resolution");
  ev->add_option("--out", ev_out);
  ev->add_option("--csv", ev_csv);
  ev->add_option("--fractions", ev_fractions);
  ev->add_flag("--with-crop,--with_crop", ev_crop);
  ev->add_option("--k", ev_k);
  ev->add_option("--chain", ev_chain);
  ev->add_option("--augs", ev_augs, "Semicolon-separated chains, or default");
  ev->add_option("--negatives", ev_neg, "Negative image directory (robustness)");
  ev->add_option("--split", ev_split, "Fraction of the corpus used as positives when --negatives is absent");
  ev->add_option("--eps-list,--eps_list", ev_eps);
  ev->add_option("--min-samples-list,--min_samples_list", ev_min);
  ev->add_option("--dump-dir,--dump_dir", ev_dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*keygen) {
      const WatermarkKey key = kg_det ? WatermarkKey::from_u64(g.seed, kg_bits, kg_tile)
                                      : WatermarkKey::generate(kg_bits, kg_tile);
      write_key_file(key, kg_out);
      emit({{"key", kg_out}, {"n_bits", key.n_bits}, {"tile", key.tile}});
    } else if (*emb) {
      const WatermarkKey key = load_key(g);
      const EmbedConfig cfg = embed_config(g, key);
      const ImageBuffer img = load_image(em_in);
      Message msg;
      if (em_msg.empty()) {
        CounterRng rng(g.seed, 0);
        msg = Message::random(key.n_bits, rng);
      } else {
        msg = Message::from_hex(em_msg, key.n_bits);
      }
      MaskMap mask = em_mask.empty() ? MaskMap(img.height, img.width, 1.0) : load_mask(em_mask);
      require_same_dims(img, mask, "mask");
      const ImageBuffer wm = (g.proc_h > 0 && g.proc_w > 0) ? embed_highres(img, msg, mask, cfg, g.proc_h, g.proc_w)
                                                            : embed(img, msg, mask, cfg);
      save_image(wm, em_out);
      emit({{"msg", msg.to_hex()},
            {"psnr", metric_or_null(psnr(wm, img))},
            {"ssim", ssim(wm, img)},
            {"watermarked_pixels", popcount(binarize(mask))}});
    } else if (*ext) {
      const ExtractorOutput out = extract(load_image(ex_in), extract_config(g, load_key(g)));
      if (!ex_det.empty()) save_gray(out.det, ex_det);
      if (!ex_dec.empty()) write_dec_tensor(out, ex_dec);
      emit({{"height", out.height()}, {"width", out.width()}, {"n_bits", out.n_bits()}});
    } else if (*det) {
      const ExtractorOutput out = extract(load_image(dt_in), extract_config(g, load_key(g)));
      const DetectionDecision d = detect_image(out, g.tau, g.tau_image);
      emit({{"s_det", d.s_det}, {"flagged", d.flagged}, {"tau", d.tau_pixel}, {"tau_image", d.tau_image}});
    } else if (*dec) {
      const ExtractorOutput out = extract(load_image(dc_in), extract_config(g, load_key(g)));
      const Message m = decode_single(out, g.tau);
      if (g.json_out)
        emit({{"msg", m.to_hex()}});
      else
        std::cout << m.to_hex() << "\n";
    } else if (*dmul) {
      const ExtractorOutput out = extract(load_image(dm_in), extract_config(g, load_key(g)));
      const DbscanParams p{g.epsilon, g.min_samples};
      const ClusterResult r =
          decode_multi(out, g.tau, p, dm_rule == "medoid" ? CentroidRule::medoid : CentroidRule::majority);
      json arr = json::array();
      for (const auto& c : r.clusters) arr.push_back({{"msg", c.centroid.to_hex()}, {"pixels", c.members.size()}});
      if (!dm_assign.empty()) save_codes(assignment_codes(r, out.height(), out.width()), dm_assign);
      emit(arr);
    } else if (*loc) {
      const ExtractorOutput out = extract(load_image(lc_in), extract_config(g, load_key(g)));
      const MaskMap m = localize(out, g.tau);
      if (!lc_out.empty()) save_mask(m, lc_out);
      const std::size_t n = popcount(m);
      emit({{"pixels", n}, {"fraction", static_cast<double>(n) / static_cast<double>(m.size())}});
    } else if (*jnd) {
      JndParams p;
      p.gamma = g.gamma;
      const Raster h = jnd_heatmap(load_image(jn_in), p);
      Raster scaled = h;
      for (double& v : scaled.data) v = std::clamp(v, 0.0, 255.0) / 255.0;
      save_gray(scaled, jn_out);
      double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
      for (double v : h.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
      }
      emit({{"min", lo}, {"max", hi}, {"mean", sum / static_cast<double>(h.size())}});
    } else if (*gm) {
      MaskGenConfig cfg;
      cfg.seed = g.seed;
      cfg.invert_prob = gm_invert;
      cfg.external_files = gm_external;
      const MaskKind kind = parse_mask_kind(gm_kind);
      cfg.weights = {0, 0, 0, 0};
      cfg.weights[static_cast<int>(kind)] = 1.0;
      cfg.validate();
      CounterRng rng(g.seed, 0);
      const MaskMap m = sample_mask(gm_h, gm_w, cfg, rng);
      save_mask(m, gm_out);
      const std::size_t n = popcount(m);
      emit({{"kind", gm_kind}, {"pixels", n}, {"fraction", static_cast<double>(n) / static_cast<double>(m.size())}});
    } else if (*aug) {
      std::vector<AugmentSpec> chain;
      if (!ag_chain.empty() && !ag_op.empty()) throw ParamError("use either --op or --chain");
      if (!ag_chain.empty()) {
        chain = parse_chain(ag_chain, g.seed);
      } else if (!ag_op.empty()) {
        chain.push_back(parse_spec(ag_param ? ag_op + ":" + std::to_string(*ag_param) : ag_op, g.seed));
      } else {
        throw ParamError("--op or --chain is required");
      }
      const ImageBuffer img = load_image(ag_in);
      std::optional<MaskMap> mask;
      if (!ag_mask.empty()) mask = load_mask(ag_mask);
      std::optional<ImageBuffer> bg;
      if (!ag_bg.empty()) bg = load_image(ag_bg);
      const AugResult r = apply_chain(img, mask ? &*mask : nullptr, chain, bg ? &*bg : nullptr);
      save_image(r.image, ag_out);
      if (!ag_out_mask.empty()) {
        if (!r.mask) throw ParamError("--out-mask needs --mask");
        save_mask(*r.mask, ag_out_mask);
      }
      emit({{"chain", chain_label(chain)}, {"height", r.image.height}, {"width", r.image.width}});
    } else if (*cal) {
      const ExtractConfig cfg = extract_config(g, load_key(g));
      const auto files = list_images(cl_dir);
      if (files.empty()) throw DataError("no images in " + cl_dir);
      std::vector<ImageBuffer> negs = cl_size > 0 ? load_corpus(cl_dir, cl_size) : std::vector<ImageBuffer>{};
      if (cl_size <= 0)
        for (const auto& f : files) negs.push_back(load_image(f));
      std::size_t pixels = 0;
      for (const auto& im : negs) pixels += im.plane_size();
      const double tau = calibrate_on(negs, cfg, cl_fpr, g.jobs);
      if (!cl_out.empty()) {
        std::ofstream f(cl_out);
        if (!f) throw IoError("cannot write " + cl_out);
        f << "# calibrated on " << negs.size() << " images, target pixel FPR " << cl_fpr << "\n";
        f << "tau=" << std::setprecision(17) << tau << "\n";
        if (!f) throw IoError("write failed: " + cl_out);
      }
      emit({{"tau", tau}, {"target_fpr", cl_fpr}, {"pixels", pixels}, {"images", negs.size()}});
    } else if (*ev) {
      const WatermarkKey key = g.key_path.empty() ? WatermarkKey::from_u64(g.seed) : load_key(g);
      CodecSettings codec;
      codec.embed = embed_config(g, key);
      codec.extract = extract_config(g, key);
      HarnessOptions opt;
      opt.seed = g.seed;
      opt.jobs = g.jobs;
      opt.tau = g.tau;
      opt.tau_image = g.tau_image;
      opt.dump_dir = ev_dump;
      if (!ev_dump.empty()) std::filesystem::create_directories(ev_dump);
      if (ev_size < 64) throw ParamError("resolution must be at least 64");
      const auto corpus = load_eval_corpus(ev_corpus, ev_size, g.seed);
      const std::vector<AugmentSpec> chain = ev_chain.empty() ? std::vector<AugmentSpec>{} : parse_chain(ev_chain, g.seed);
      EvalReport rep;
      switch (parse_protocol(ev_protocol)) {
        case Protocol::localization: {
          std::vector<double> fr;
          for (const auto& s : split(ev_fractions, ',')) fr.push_back(std::stod(s));
          rep = run_localization(corpus, codec, fr, ev_crop, opt);
          break;
        }
        case Protocol::multiwm:
          rep = run_multiwm(corpus, codec, ev_k, chain, DbscanParams{g.epsilon, g.min_samples}, opt);
          break;
        case Protocol::robustness: {
          std::vector<ImageBuffer> pos, neg;
          if (!ev_neg.empty()) {
            pos = corpus;
            neg = load_corpus(ev_neg, ev_size);
          } else {
            if (!(ev_split >= 0 && ev_split <= 1)) throw ParamError("--split must be in [0,1]");
            const auto np = static_cast<std::size_t>(std::llround(ev_split * static_cast<double>(corpus.size())));
            pos.assign(corpus.begin(), corpus.begin() + static_cast<std::ptrdiff_t>(np));
            neg.assign(corpus.begin() + static_cast<std::ptrdiff_t>(np), corpus.end());
          }
          std::vector<std::vector<AugmentSpec>> augs;
          if (ev_augs == "default")
            augs = default_robustness_augs(g.seed);
          else
            for (const auto& c : split(ev_augs, ';')) augs.push_back(parse_chain(c, g.seed));
          rep = run_robustness(pos, neg, codec, augs, opt);
          break;
        }
        case Protocol::dbscan_grid: {
          std::vector<int> eps;
          std::vector<std::int64_t> ms;
          for (const auto& s : split(ev_eps, ',')) eps.push_back(std::stoi(s));
          for (const auto& s : split(ev_min, ',')) ms.push_back(std::stoll(s));
          rep = run_dbscan_grid(corpus, codec, eps, ms, chain, opt);
          break;
        }
      }
      if (!ev_out.empty()) rep.write_json(ev_out);
      if (!ev_csv.empty()) rep.write_csv(ev_csv);
      emit(rep.to_json());
    }
  } catch (const ParamError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
