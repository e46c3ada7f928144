#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wmseg/image.hpp"
#include "wmseg/rng.hpp"

namespace wmseg {

enum class MaskKind { box = 0, full = 1, irregular = 2, external = 3 };

struct MaskGenConfig {
  std::uint64_t seed = 0;
  std::array<double, 4> weights{0.25, 0.25, 0.25, 0.25};  // box, full, irregular, external
  double invert_prob = 0.5;
  std::array<double, 3> multi_counts{0.6, 0.2, 0.2};  // 1, 2, 3 masks
  std::vector<std::string> external_files;
  void validate() const;
};

struct Box {
  int top, left, height, width;
};

constexpr int kBoxMargin = 10;
constexpr int kBoxMin = 30;
constexpr int kBoxMax = 100;

// One box with sides in [30,100] inside a 10-pixel margin; sides clamp to fit small images.
Box sample_box(int h, int w, CounterRng& rng);
MaskMap sample_box_masks(int h, int w, CounterRng& rng);
// Filled disc of the given diameter centered at (cy, cx), clipped to the raster.
void stamp_disc(MaskMap& m, double cy, double cx, double diameter);
MaskMap sample_irregular_mask(int h, int w, CounterRng& rng);
MaskKind sample_kind(const MaskGenConfig& cfg, CounterRng& rng);
MaskMap sample_mask(int h, int w, const MaskGenConfig& cfg, CounterRng& rng);
int sample_mask_count(const MaskGenConfig& cfg, CounterRng& rng);
// Pairwise-disjoint single-box masks; throws DataError after 1000 failed placements of a box.
std::vector<MaskMap> sample_disjoint_masks(int h, int w, int count, CounterRng& rng);

MaskKind parse_mask_kind(const std::string& s);

}  // namespace wmseg
