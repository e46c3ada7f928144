#include "wmseg/maskgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wmseg/error.hpp"
#include "wmseg/filter.hpp"
#include "wmseg/raster_io.hpp"

namespace wmseg {

void MaskGenConfig::validate() const {
  double s = 0.0;
  for (double w : weights) {
    if (!(w >= 0)) throw ParamError("mask kind weights must be non-negative");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-9) throw ParamError("mask kind weights must sum to 1");
  if (!(invert_prob >= 0 && invert_prob <= 1)) throw ParamError("invert probability must be in [0,1]");
  double m = 0.0;
  for (double w : multi_counts) {
    if (!(w >= 0)) throw ParamError("mask count weights must be non-negative");
    m += w;
  }
  if (std::abs(m - 1.0) > 1e-9) throw ParamError("mask count weights must sum to 1");
}

Box sample_box(int h, int w, CounterRng& rng) {
  auto side = [&](int dim) {
    const int room = std::max(1, dim - 2 * kBoxMargin);
    const int hi = std::min(kBoxMax, room), lo = std::min(kBoxMin, hi);
    return static_cast<int>(rng.uniform_int(lo, hi));
  };
  Box b{};
  b.height = side(h);
  b.width = side(w);
  auto place = [&](int dim, int len) {
    const int lo = std::min(kBoxMargin, std::max(0, dim - len));
    const int hi = std::max(lo, dim - kBoxMargin - len);
    return static_cast<int>(rng.uniform_int(lo, hi));
  };
  b.top = place(h, b.height);
  b.left = place(w, b.width);
  return b;
}

MaskMap sample_box_masks(int h, int w, CounterRng& rng) {
  MaskMap m(h, w);
  const int n = static_cast<int>(rng.uniform_int(1, 3));
  for (int k = 0; k < n; ++k) {
    const Box b = sample_box(h, w, rng);
    for (int i = b.top; i < std::min(h, b.top + b.height); ++i)
      for (int j = b.left; j < std::min(w, b.left + b.width); ++j) m.at(i, j) = 1.0;
  }
  return m;
}

void stamp_disc(MaskMap& m, double cy, double cx, double diameter) {
  const double r = diameter / 2.0, r2 = r * r;
  const int i0 = std::max(0, static_cast<int>(std::floor(cy - r))), i1 = std::min(m.height - 1, static_cast<int>(std::ceil(cy + r)));
  const int j0 = std::max(0, static_cast<int>(std::floor(cx - r))), j1 = std::min(m.width - 1, static_cast<int>(std::ceil(cx + r)));
  for (int i = i0; i <= i1; ++i)
    for (int j = j0; j <= j1; ++j)
      if ((i - cy) * (i - cy) + (j - cx) * (j - cx) <= r2) m.at(i, j) = 1.0;
}

MaskMap sample_irregular_mask(int h, int w, CounterRng& rng) {
  MaskMap m(h, w);
  const int strokes = static_cast<int>(rng.uniform_int(1, 5));
  const double max_turn = 4.0 * std::numbers::pi / 180.0;
  for (int s = 0; s < strokes; ++s) {
    double y = rng.uniform(0.0, h), x = rng.uniform(0.0, w);
    double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double width = rng.uniform(20.0, 50.0);
    const int segments = static_cast<int>(rng.uniform_int(1, 6));
    stamp_disc(m, y, x, width);
    for (int g = 0; g < segments; ++g) {
      angle += rng.uniform(-max_turn, max_turn);
      const double len = rng.uniform(20.0, 50.0);
      const double step = std::max(1.0, width / 4.0);
      const int n = static_cast<int>(std::ceil(len / step));
      const double ny = y + len * std::sin(angle), nx = x + len * std::cos(angle);
      for (int t = 1; t <= n; ++t) {
        const double f = static_cast<double>(t) / n;
        stamp_disc(m, y + f * (ny - y), x + f * (nx - x), width);
      }
      y = ny;
      x = nx;
    }
  }
  return m;
}

MaskKind sample_kind(const MaskGenConfig& cfg, CounterRng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  int last = 0;
  for (int k = 0; k < 4; ++k) {
    if (cfg.weights[k] <= 0) continue;
    last = k;
    acc += cfg.weights[k];
    if (u < acc) return static_cast<MaskKind>(k);
  }
  return static_cast<MaskKind>(last);
}

MaskMap sample_mask(int h, int w, const MaskGenConfig& cfg, CounterRng& rng) {
  cfg.validate();
  MaskMap m;
  switch (sample_kind(cfg, rng)) {
    case MaskKind::box:
      m = sample_box_masks(h, w, rng);
      break;
    case MaskKind::full:
      m = MaskMap(h, w, 1.0);
      break;
    case MaskKind::irregular:
      m = sample_irregular_mask(h, w, rng);
      break;
    case MaskKind::external: {
      if (cfg.external_files.empty()) throw DataError("external mask kind chosen but no mask files registered");
      const auto idx = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(cfg.external_files.size()) - 1));
      const MaskMap loaded = load_mask(cfg.external_files[idx]);
      m = binarize(resize_bilinear(loaded, h, w));
      break;
    }
  }
  if (rng.bernoulli(cfg.invert_prob)) m = complement(m);
  return m;
}

int sample_mask_count(const MaskGenConfig& cfg, CounterRng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (int k = 0; k < 3; ++k) {
    acc += cfg.multi_counts[k];
    if (u < acc) return k + 1;
  }
  return 3;
}

std::vector<MaskMap> sample_disjoint_masks(int h, int w, int count, CounterRng& rng) {
  if (count < 1 || count > 5) throw ParamError("disjoint mask count must be in [1,5]");
  constexpr int kMaxAttempts = 1000;
  std::vector<Box> boxes;
  for (int k = 0; k < count; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      const Box b = sample_box(h, w, rng);
      placed = std::none_of(boxes.begin(), boxes.end(), [&](const Box& o) {
        return b.top < o.top + o.height && o.top < b.top + b.height && b.left < o.left + o.width &&
               o.left < b.left + b.width;
      });
      if (placed) boxes.push_back(b);
    }
    if (!placed) throw DataError("cannot place disjoint masks");
  }
  std::vector<MaskMap> out;
  for (const Box& b : boxes) out.push_back(rect_mask(h, w, b.top, b.left, b.height, b.width));
  return out;
}

MaskKind parse_mask_kind(const std::string& s) {
  if (s == "box") return MaskKind::box;
  if (s == "full") return MaskKind::full;
  if (s == "irregular") return MaskKind::irregular;
  if (s == "external") return MaskKind::external;
  throw ParamError("unknown mask kind: " + s);
}

}  // namespace wmseg
