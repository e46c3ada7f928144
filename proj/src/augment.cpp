#include "wmseg/augment.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wmseg/error.hpp"
#include "wmseg/filter.hpp"
#include "wmseg/jpeg.hpp"

namespace wmseg {

namespace {

struct KindName {
  AugKind kind;
  const char* name;
};

constexpr KindName kNames[] = {
    {AugKind::identity, "identity"},
    {AugKind::hflip, "hflip"},
    {AugKind::crop, "crop"},
    {AugKind::resize, "resize"},
    {AugKind::rotate, "rotate"},
    {AugKind::perspective, "perspective"},
    {AugKind::brightness, "brightness"},
    {AugKind::contrast, "contrast"},
    {AugKind::hue, "hue"},
    {AugKind::saturation, "saturation"},
    {AugKind::gaussian_blur, "gaussian_blur"},
    {AugKind::median_filter, "median_filter"},
    {AugKind::jpeg, "jpeg"},
    {AugKind::splice_proportion, "splice_proportion"},
    {AugKind::splice_collage, "splice_collage"},
};

bool needs_param(AugKind k) { return k != AugKind::identity && k != AugKind::hflip; }

int odd_kernel(double param, int hi, const char* what) {
  const int k = static_cast<int>(std::lround(param));
  if (k != param || k < 1 || k > hi || k % 2 == 0)
    throw ParamError(std::string(what) + " kernel size must be odd in [1," + std::to_string(hi) + "]");
  return k;
}

void require_range(double v, double lo, double hi, const char* what) {
  if (!(v >= lo && v <= hi)) {
    std::ostringstream os;
    os << what << " parameter must be in [" << lo << ", " << hi << "]";
    throw ParamError(os.str());
  }
}

// A spatial map shared by image channels and the mask.
struct Geometry {
  int out_h = 0, out_w = 0;
  InverseMap inv;
};

Geometry geometry_for(const AugmentSpec& spec, int h, int w) {
  Geometry g;
  switch (spec.kind) {
    case AugKind::hflip:
      g.out_h = h;
      g.out_w = w;
      g.inv = [w](double i, double j, double& y, double& x) {
        y = i;
        x = w - 1 - j;
      };
      break;
    case AugKind::crop: {
      g.out_h = std::max(1, static_cast<int>(std::lround(spec.param * h)));
      g.out_w = std::max(1, static_cast<int>(std::lround(spec.param * w)));
      CounterRng rng(spec.seed, 0x63726f70);
      const int top = static_cast<int>(rng.uniform_int(0, h - g.out_h));
      const int left = static_cast<int>(rng.uniform_int(0, w - g.out_w));
      g.inv = [top, left](double i, double j, double& y, double& x) {
        y = i + top;
        x = j + left;
      };
      break;
    }
    case AugKind::rotate: {
      g.out_h = h;
      g.out_w = w;
      const double t = spec.param * std::numbers::pi / 180.0, c = std::cos(t), s = std::sin(t);
      const double cy = (h - 1) / 2.0, cx = (w - 1) / 2.0;
      // Positive angles rotate the content counter-clockwise.
      g.inv = [=](double i, double j, double& y, double& x) {
        x = cx + c * (j - cx) - s * (i - cy);
        y = cy + s * (j - cx) + c * (i - cy);
      };
      break;
    }
    case AugKind::perspective: {
      g.out_h = h;
      g.out_w = w;
      CounterRng rng(spec.seed, 0x70657273);
      const double dx = spec.param * w / 2.0, dy = spec.param * h / 2.0;
      const double src[4][2] = {{0, 0}, {w - 1.0, 0}, {w - 1.0, h - 1.0}, {0, h - 1.0}};
      double dst[4][2];
      const double sx[4] = {1, -1, -1, 1}, sy[4] = {1, 1, -1, -1};
      for (int k = 0; k < 4; ++k) {
        dst[k][0] = src[k][0] + sx[k] * rng.uniform(0.0, dx);
        dst[k][1] = src[k][1] + sy[k] * rng.uniform(0.0, dy);
      }
      // Homography taking output corners (dst) back to input corners (src).
      Eigen::Matrix<double, 8, 8> a;
      Eigen::Matrix<double, 8, 1> b;
      for (int k = 0; k < 4; ++k) {
        const double u = dst[k][0], v = dst[k][1], x = src[k][0], y = src[k][1];
        a.row(2 * k) << u, v, 1, 0, 0, 0, -u * x, -v * x;
        a.row(2 * k + 1) << 0, 0, 0, u, v, 1, -u * y, -v * y;
        b(2 * k) = x;
        b(2 * k + 1) = y;
      }
      const Eigen::Matrix<double, 8, 1> p = a.fullPivLu().solve(b);
      g.inv = [p](double i, double j, double& y, double& x) {
        const double den = p(6) * j + p(7) * i + 1.0;
        x = (p(0) * j + p(1) * i + p(2)) / den;
        y = (p(3) * j + p(4) * i + p(5)) / den;
      };
      break;
    }
    default:
      throw ParamError("not a warp-based geometric transform");
  }
  return g;
}

ImageBuffer map_image(const ImageBuffer& img, const std::function<Raster(const Raster&)>& f) {
  ImageBuffer out;
  for (int c = 0; c < 3; ++c) {
    Raster r = f(img.channel(c));
    if (c == 0) out = ImageBuffer(r.height, r.width);
    out.set_channel(c, r);
  }
  return out;
}

}  // namespace

bool is_geometric(AugKind kind) {
  return kind == AugKind::hflip || kind == AugKind::crop || kind == AugKind::resize || kind == AugKind::rotate ||
         kind == AugKind::perspective;
}

std::string kind_name(AugKind kind) {
  for (const auto& kn : kNames)
    if (kn.kind == kind) return kn.name;
  return "unknown";
}

AugKind parse_kind(const std::string& name) {
  for (const auto& kn : kNames)
    if (name == kn.name) return kn.kind;
  if (name == "blur") return AugKind::gaussian_blur;
  if (name == "median") return AugKind::median_filter;
  if (name == "rotation") return AugKind::rotate;
  throw ParamError("unknown augmentation: " + name);
}

void validate(const AugmentSpec& spec) {
  const double p = spec.param;
  switch (spec.kind) {
    case AugKind::identity:
    case AugKind::hflip:
      return;
    case AugKind::crop:
      if (!(p > 0 && p <= 1)) throw ParamError("crop ratio must be in (0,1]");
      return;
    case AugKind::resize:
      return require_range(p, 0.5, 1.5, "resize");
    case AugKind::rotate:
      return require_range(p, -10, 10, "rotate");
    case AugKind::perspective:
      return require_range(p, 0, 0.5, "perspective");
    case AugKind::brightness:
    case AugKind::contrast:
    case AugKind::saturation:
      return require_range(p, 0, 2, kind_name(spec.kind).c_str());
    case AugKind::hue:
      return require_range(p, -0.1, 0.1, "hue");
    case AugKind::gaussian_blur:
      odd_kernel(p, 17, "gaussian_blur");
      return;
    case AugKind::median_filter:
      odd_kernel(p, 7, "median_filter");
      return;
    case AugKind::jpeg:
      if (p != std::floor(p) || p < 1 || p > 100) throw ParamError("JPEG quality must be an integer in [1,100]");
      return;
    case AugKind::splice_proportion:
    case AugKind::splice_collage:
      if (!(p > 0 && p <= 1)) throw ParamError("splice area fraction must be in (0,1]");
      return;
  }
}

AugmentSpec parse_spec(const std::string& text, std::uint64_t seed) {
  AugmentSpec s;
  s.seed = seed;
  const auto colon = text.find(':');
  s.kind = parse_kind(text.substr(0, colon));
  if (colon != std::string::npos) {
    const std::string v = text.substr(colon + 1);
    std::size_t used = 0;
    try {
      s.param = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size()) throw ParamError("invalid augmentation parameter: " + text);
  } else if (needs_param(s.kind)) {
    throw ParamError("augmentation needs a parameter: " + text);
  }
  validate(s);
  return s;
}

std::vector<AugmentSpec> combination_chain(std::uint64_t seed) {
  return {{AugKind::jpeg, 80, seed}, {AugKind::brightness, 1.5, seed}, {AugKind::crop, 0.5, seed}};
}

std::vector<AugmentSpec> parse_chain(const std::string& text, std::uint64_t seed) {
  std::vector<AugmentSpec> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "combination") {
      for (auto& s : combination_chain(seed)) out.push_back(s);
    } else {
      out.push_back(parse_spec(item, seed));
    }
  }
  return out;
}

std::string spec_label(const AugmentSpec& spec) {
  if (!needs_param(spec.kind)) return kind_name(spec.kind);
  std::ostringstream os;
  os << kind_name(spec.kind) << ":" << spec.param;
  return os.str();
}

std::string chain_label(const std::vector<AugmentSpec>& chain) {
  if (chain.empty()) return "identity";
  std::string s;
  for (const auto& c : chain) s += (s.empty() ? "" : ",") + spec_label(c);
  return s;
}

ImageBuffer hflip(const ImageBuffer& img) {
  ImageBuffer out(img.height, img.width);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < img.height; ++i)
      for (int j = 0; j < img.width; ++j) out.at(c, i, j) = img.at(c, i, img.width - 1 - j);
  return out;
}

ImageBuffer adjust_brightness(const ImageBuffer& img, double f) {
  ImageBuffer out = img;
  for (double& v : out.data) v = std::clamp(f * v, 0.0, 1.0);
  return out;
}

namespace {
double luma(const ImageBuffer& img, std::size_t p) {
  return 0.299 * img.plane(0)[p] + 0.587 * img.plane(1)[p] + 0.114 * img.plane(2)[p];
}
}  // namespace

ImageBuffer adjust_contrast(const ImageBuffer& img, double f) {
  double mean = 0.0;
  for (std::size_t p = 0; p < img.plane_size(); ++p) mean += luma(img, p);
  mean /= static_cast<double>(std::max<std::size_t>(1, img.plane_size()));
  ImageBuffer out = img;
  for (double& v : out.data) v = std::clamp(mean + f * (v - mean), 0.0, 1.0);
  return out;
}

ImageBuffer adjust_saturation(const ImageBuffer& img, double f) {
  ImageBuffer out = img;
  for (std::size_t p = 0; p < img.plane_size(); ++p) {
    const double g = luma(img, p);
    for (int c = 0; c < 3; ++c) out.plane(c)[p] = std::clamp(g + f * (img.plane(c)[p] - g), 0.0, 1.0);
  }
  return out;
}

ImageBuffer adjust_hue(const ImageBuffer& img, double shift) {
  ImageBuffer out = img;
  for (std::size_t p = 0; p < img.plane_size(); ++p) {
    const double r = img.plane(0)[p], g = img.plane(1)[p], b = img.plane(2)[p];
    const double mx = std::max({r, g, b}), mn = std::min({r, g, b}), d = mx - mn;
    double h = 0.0;
    if (d > 0) {
      if (mx == r) h = (g - b) / d;
      else if (mx == g) h = 2.0 + (b - r) / d;
      else h = 4.0 + (r - g) / d;
      h /= 6.0;
    }
    const double s = mx > 0 ? d / mx : 0.0, v = mx;
    h = h + shift;
    h -= std::floor(h);
    const double h6 = h * 6.0;
    const int sector = static_cast<int>(std::floor(h6)) % 6;
    const double f = h6 - std::floor(h6);
    const double pp = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
    double rgb[3];
    switch (sector) {
      case 0: rgb[0] = v; rgb[1] = t; rgb[2] = pp; break;
      case 1: rgb[0] = q; rgb[1] = v; rgb[2] = pp; break;
      case 2: rgb[0] = pp; rgb[1] = v; rgb[2] = t; break;
      case 3: rgb[0] = pp; rgb[1] = q; rgb[2] = v; break;
      case 4: rgb[0] = t; rgb[1] = pp; rgb[2] = v; break;
      default: rgb[0] = v; rgb[1] = pp; rgb[2] = q; break;
    }
    for (int c = 0; c < 3; ++c) out.plane(c)[p] = std::clamp(rgb[c], 0.0, 1.0);
  }
  return out;
}

double blur_sigma(int k) { return 0.3 * ((k - 1) / 2.0 - 1.0) + 0.8; }

ImageBuffer gaussian_blur(const ImageBuffer& img, int k) {
  if (k < 1 || k % 2 == 0) throw ParamError("blur kernel size must be odd");
  if (k == 1) return img;
  const double sigma = blur_sigma(k);
  std::vector<double> g(k);
  double s = 0.0;
  for (int i = 0; i < k; ++i) {
    const double x = i - (k - 1) / 2.0;
    g[i] = std::exp(-x * x / (2 * sigma * sigma));
    s += g[i];
  }
  for (double& v : g) v /= s;
  return map_image(img, [&](const Raster& r) { return separable(r, g); });
}

ImageBuffer median_filter(const ImageBuffer& img, int k) {
  if (k < 1 || k % 2 == 0) throw ParamError("median kernel size must be odd");
  if (k == 1) return img;
  const int r = k / 2;
  std::vector<double> win(static_cast<std::size_t>(k) * k);
  return map_image(img, [&](const Raster& src) {
    Raster out(src.height, src.width);
    for (int i = 0; i < src.height; ++i)
      for (int j = 0; j < src.width; ++j) {
        std::size_t n = 0;
        for (int a = -r; a <= r; ++a)
          for (int b = -r; b <= r; ++b)
            win[n++] = src.at(std::clamp(i + a, 0, src.height - 1), std::clamp(j + b, 0, src.width - 1));
        std::nth_element(win.begin(), win.begin() + n / 2, win.end());
        out.at(i, j) = win[n / 2];
      }
    return out;
  });
}

SpliceResult splice(const ImageBuffer& img_wm, const ImageBuffer& background, double area_fraction, CounterRng& rng) {
  require_same_dims(img_wm, background, "splice");
  if (!(area_fraction > 0 && area_fraction <= 1)) throw ParamError("splice area fraction must be in (0,1]");
  const double s = std::sqrt(area_fraction);
  const int h = img_wm.height, w = img_wm.width;
  const int rh = std::clamp(static_cast<int>(std::lround(s * h)), 1, h);
  const int rw = std::clamp(static_cast<int>(std::lround(s * w)), 1, w);
  const int top = static_cast<int>(rng.uniform_int(0, h - rh));
  const int left = static_cast<int>(rng.uniform_int(0, w - rw));
  SpliceResult out{background, rect_mask(h, w, top, left, rh, rw)};
  for (int c = 0; c < 3; ++c)
    for (int i = top; i < top + rh; ++i)
      for (int j = left; j < left + rw; ++j) out.image.at(c, i, j) = img_wm.at(c, i, j);
  return out;
}

AugResult apply(const ImageBuffer& img, const MaskMap* mask, const AugmentSpec& spec, const ImageBuffer* background) {
  validate(spec);
  if (mask) require_same_dims(img, *mask, "augment mask");
  AugResult res;
  const double p = spec.param;
  if (is_geometric(spec.kind)) {
    if (spec.kind == AugKind::resize) {
      const int oh = std::max(1, static_cast<int>(std::lround(p * img.height)));
      const int ow = std::max(1, static_cast<int>(std::lround(p * img.width)));
      res.image = resize_bilinear(img, oh, ow);
      if (mask) res.mask = binarize(resize_bilinear(*mask, oh, ow));
      return res;
    }
    const Geometry g = geometry_for(spec, img.height, img.width);
    auto f = [&](const Raster& r) { return warp(r, g.out_h, g.out_w, g.inv, 0.0); };
    res.image = map_image(img, f);
    if (mask) res.mask = binarize(f(*mask));
    return res;
  }
  if (mask) res.mask = *mask;
  switch (spec.kind) {
    case AugKind::identity:
      res.image = img;
      break;
    case AugKind::brightness:
      res.image = adjust_brightness(img, p);
      break;
    case AugKind::contrast:
      res.image = adjust_contrast(img, p);
      break;
    case AugKind::saturation:
      res.image = adjust_saturation(img, p);
      break;
    case AugKind::hue:
      res.image = adjust_hue(img, p);
      break;
    case AugKind::gaussian_blur:
      res.image = gaussian_blur(img, static_cast<int>(p));
      break;
    case AugKind::median_filter:
      res.image = median_filter(img, static_cast<int>(p));
      break;
    case AugKind::jpeg:
      res.image = jpeg_roundtrip(img, static_cast<int>(p));
      break;
    case AugKind::splice_proportion:
    case AugKind::splice_collage: {
      if (!background) throw ParamError(kind_name(spec.kind) + " needs a background image");
      CounterRng rng(spec.seed, 0x73706c69);
      SpliceResult s = splice(img, *background, p, rng);
      res.image = std::move(s.image);
      if (mask) {
        for (std::size_t q = 0; q < s.mask.size(); ++q) s.mask.data[q] = (s.mask.data[q] > 0.5 && mask->data[q] > 0.5);
      }
      res.mask = std::move(s.mask);
      break;
    }
    default:
      throw ParamError("unhandled augmentation");
  }
  return res;
}

AugResult apply_chain(const ImageBuffer& img, const MaskMap* mask, const std::vector<AugmentSpec>& chain,
                      const ImageBuffer* background) {
  AugResult cur{img, mask ? std::optional<MaskMap>(*mask) : std::nullopt};
  for (const auto& spec : chain) {
    AugResult next = apply(cur.image, cur.mask ? &*cur.mask : nullptr, spec, background);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace wmseg
