#include "wmseg/codec.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "wmseg/error.hpp"
#include "wmseg/filter.hpp"

namespace wmseg {

void CarrierShaping::validate() const {
  if (!(sync_weight > 0)) throw ParamError("sync weight must be > 0");
  if (!(gain > 0)) throw ParamError("carrier gain must be > 0");
  if (!(knee > 0)) throw ParamError("gain knee must be > 0");
}

void EmbedConfig::validate() const {
  if (!(alpha_jnd > 0)) throw ParamError("alpha_jnd must be > 0");
  key.validate();
  jnd_params.validate();
  shaping.validate();
}

void ExtractConfig::validate() const {
  key.validate();
  jnd_params.validate();
  if (window < 4) throw ParamError("extraction window must be >= 4");
  if (norm_window < 1) throw ParamError("normalization window must be >= 1");
  if (!(slope > 0)) throw ParamError("logistic slope must be > 0");
  if (!(knee > 0)) throw ParamError("gain knee must be > 0");
  if (proc_h < 0 || proc_w < 0 || (proc_h == 0) != (proc_w == 0)) throw ParamError("invalid processing size");
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Raster carrier_sum(const CarrierBank& bank, const Message& msg, double sync_weight, int h, int w) {
  const int n = msg.size();
  if (n + 1 != bank.count()) throw DataError("message length does not match key n_bits");
  const int t = bank.tile();
  // One tile of the sum, then tiled over the grid.
  std::vector<double> tile(static_cast<std::size_t>(t) * t);
  const double norm = std::sqrt(sync_weight * sync_weight + n);
  for (int p = 0; p < t * t; ++p) {
    double s = sync_weight * bank.pattern(0)[p];
    for (int k = 1; k <= n; ++k) s += msg.sign(k - 1) * bank.pattern(k)[p];
    tile[p] = s / norm;
  }
  Raster out(h, w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) out.at(i, j) = tile[(i % t) * t + (j % t)];
  return out;
}

double carrier_sum_bound(double sync_weight, int n_bits) {
  return (sync_weight + n_bits) / std::sqrt(sync_weight * sync_weight + n_bits);
}

Raster make_delta(const ImageBuffer& img, const Message& msg, const EmbedConfig& cfg) {
  cfg.validate();
  if (msg.size() != cfg.key.n_bits) throw DataError("message length does not match key n_bits");
  const CarrierBank bank(cfg.key);
  Raster delta = carrier_sum(bank, msg, cfg.shaping.sync_weight, img.height, img.width);
  const Raster h = jnd_heatmap(img, cfg.jnd_params);
  const double bound = carrier_sum_bound(cfg.shaping.sync_weight, msg.size());
  const double knee = cfg.shaping.knee;
  for (std::size_t p = 0; p < delta.size(); ++p) {
    const double g = std::min(cfg.shaping.gain * knee / (h.data[p] + knee), 1.0 / bound);
    delta.data[p] = std::clamp(g * delta.data[p], -1.0, 1.0);
  }
  return delta;
}

ImageBuffer apply_delta(const ImageBuffer& img, const Raster& delta, const MaskMap& mask, const EmbedConfig& cfg) {
  require_same_dims(img, mask, "embed mask");
  require_same_dims(img, delta, "embed signal");
  const Raster h = jnd_heatmap(img, cfg.jnd_params);
  ImageBuffer out = img;
  for (int c = 0; c < 3; ++c) {
    double* dst = out.plane(c);
    const double a = cfg.alpha_jnd * cfg.jnd_params.alpha_rgb[c] / 255.0;
    for (std::size_t p = 0; p < img.plane_size(); ++p) {
      if (!(mask.data[p] > 0.5)) continue;
      dst[p] = std::clamp(dst[p] + a * h.data[p] * delta.data[p], 0.0, 1.0);
    }
  }
  return out;
}

ImageBuffer embed(const ImageBuffer& img, const Message& msg, const MaskMap& mask, const EmbedConfig& cfg) {
  require_same_dims(img, mask, "embed mask");
  return apply_delta(img, make_delta(img, msg, cfg), mask, cfg);
}

Raster highres_delta(const ImageBuffer& img, const Message& msg, const EmbedConfig& cfg, int proc_h, int proc_w) {
  if (proc_h < 16 || proc_w < 16) throw ParamError("processing size must be >= 16");
  if (proc_h == img.height && proc_w == img.width) return make_delta(img, msg, cfg);
  const ImageBuffer small = resize_bilinear(img, proc_h, proc_w);
  return resize_bilinear(make_delta(small, msg, cfg), img.height, img.width);
}

ImageBuffer embed_highres(const ImageBuffer& img, const Message& msg, const MaskMap& mask, const EmbedConfig& cfg,
                          int proc_h, int proc_w) {
  require_same_dims(img, mask, "embed mask");
  return apply_delta(img, highres_delta(img, msg, cfg, proc_h, proc_w), mask, cfg);
}

namespace {

// Carriers after the receiver's residual filter, on the tile torus.
std::vector<std::vector<double>> filtered_carriers(const CarrierBank& bank) {
  const int t = bank.tile();
  std::vector<std::vector<double>> f(bank.count(), std::vector<double>(static_cast<std::size_t>(t) * t));
  for (int k = 0; k < bank.count(); ++k)
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < t; ++j) {
        double nb = 0.0;
        for (int di = -1; di <= 1; ++di)
          for (int dj = -1; dj <= 1; ++dj)
            if (di || dj) nb += bank.at(k, i + di, j + dj);
        f[k][i * t + j] = bank.at(k, i, j) - nb / 8.0;
      }
  return f;
}

std::vector<Raster> native_statistics(const ImageBuffer& img, const ExtractConfig& cfg) {
  const CarrierBank bank(cfg.key);
  const int h = img.height, w = img.width, t = bank.tile(), m = bank.count();
  const std::size_t n = static_cast<std::size_t>(h) * w;

  Raster gray = luminance(img);
  for (double& v : gray.data) v /= 255.0;
  Raster r = neighbour_mean8(gray);
  for (std::size_t p = 0; p < n; ++p) r.data[p] = gray.data[p] - r.data[p];
  // Undo the expected amplitude profile of the embedder.
  const Raster hm = jnd_heatmap(img, cfg.jnd_params);
  for (std::size_t p = 0; p < n; ++p) {
    const double a = hm.data[p] * cfg.knee / (hm.data[p] + cfg.knee);
    r.data[p] /= a + 0.5;
  }
  Raster e = r;
  for (double& v : e.data) v *= v;
  e = box_mean(e, cfg.norm_window);

  const auto f = filtered_carriers(bank);
  Eigen::MatrixXd gram(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double s = 0.0;
      for (int p = 0; p < t * t; ++p) s += f[a][p] * f[b][p];
      gram(a, b) = s / (t * t);
    }
  const Eigen::MatrixXd gi = gram.ldlt().solve(Eigen::MatrixXd::Identity(m, m));
  Eigen::VectorXd norm(m);
  for (int k = 0; k < m; ++k) norm(k) = 1.0 / std::sqrt(gi(k, k));
  const Eigen::MatrixXd proj = norm.asDiagonal() * gi;

  std::vector<Raster> v(m);
  Raster prod(h, w);
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) prod.at(i, j) = r.at(i, j) * f[k][(i % t) * t + (j % t)];
    v[k] = box_mean(prod, cfg.window);
  }

  std::vector<Raster> stats(m, Raster(h, w));
  Eigen::VectorXd vp(m), sp(m);
  for (std::size_t p = 0; p < n; ++p) {
    const double energy = e.data[p];
    if (!(energy > 1e-24)) continue;
    for (int k = 0; k < m; ++k) vp(k) = v[k].data[p];
    sp.noalias() = proj * vp;
    const double inv = 1.0 / std::sqrt(energy);
    for (int k = 0; k < m; ++k) stats[k].data[p] = sp(k) * inv;
  }
  return stats;
}

}  // namespace

std::vector<Raster> correlation_statistics(const ImageBuffer& img, const ExtractConfig& cfg) {
  cfg.validate();
  if (img.height < 1 || img.width < 1) throw DataError("extract: empty image");
  if (cfg.proc_h == 0 || (cfg.proc_h == img.height && cfg.proc_w == img.width)) return native_statistics(img, cfg);
  auto stats = native_statistics(resize_bilinear(img, cfg.proc_h, cfg.proc_w), cfg);
  for (auto& s : stats) s = resize_bilinear(s, img.height, img.width);
  return stats;
}

ExtractorOutput extract(const ImageBuffer& img, const ExtractConfig& cfg) {
  auto stats = correlation_statistics(img, cfg);
  ExtractorOutput out;
  out.det = std::move(stats[0]);
  for (double& v : out.det.data) v = logistic(cfg.slope * (v - cfg.det_bias));
  out.dec.reserve(stats.size() - 1);
  for (std::size_t k = 1; k < stats.size(); ++k) {
    for (double& v : stats[k].data) v = logistic(cfg.slope * v);
    out.dec.push_back(std::move(stats[k]));
  }
  return out;
}

namespace {
void put_u32(std::ofstream& f, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  f.write(reinterpret_cast<const char*>(b), 4);
}
std::uint32_t get_u32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}
}  // namespace

void write_dec_tensor(const ExtractorOutput& out, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f.write("WAMD", 4);
  put_u32(f, static_cast<std::uint32_t>(out.n_bits()));
  put_u32(f, static_cast<std::uint32_t>(out.height()));
  put_u32(f, static_cast<std::uint32_t>(out.width()));
  for (const auto& r : out.dec)
    for (double v : r.data) put_u32(f, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  if (!f) throw IoError("cannot write " + path);
}

std::vector<Raster> read_dec_tensor(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  unsigned char hdr[16];
  f.read(reinterpret_cast<char*>(hdr), 16);
  if (f.gcount() != 16 || std::memcmp(hdr, "WAMD", 4) != 0) throw DataError("not a y_dec tensor file: " + path);
  const std::uint32_t n = get_u32(hdr + 4), h = get_u32(hdr + 8), w = get_u32(hdr + 12);
  if (n > 4096 || static_cast<std::uint64_t>(h) * w > (1ULL << 28)) throw DataError("implausible tensor header: " + path);
  std::vector<Raster> out(n, Raster(static_cast<int>(h), static_cast<int>(w)));
  std::vector<unsigned char> buf(static_cast<std::size_t>(h) * w * 4);
  for (auto& r : out) {
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (f.gcount() != static_cast<std::streamsize>(buf.size())) throw IoError("truncated tensor file: " + path);
    for (std::size_t p = 0; p < r.size(); ++p) r.data[p] = std::bit_cast<float>(get_u32(&buf[4 * p]));
  }
  return out;
}

}  // namespace wmseg
