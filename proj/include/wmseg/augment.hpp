#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wmseg/image.hpp"
#include "wmseg/rng.hpp"

namespace wmseg {

enum class AugKind {
  identity,
  hflip,
  crop,
  resize,
  rotate,
  perspective,
  brightness,
  contrast,
  hue,
  saturation,
  gaussian_blur,
  median_filter,
  jpeg,
  splice_proportion,
  splice_collage,
};

struct AugmentSpec {
  AugKind kind = AugKind::identity;
  double param = 0.0;
  // Drives random placement (crop window, perspective corners, splice rectangle).
  std::uint64_t seed = 0;
};

struct AugResult {
  ImageBuffer image;
  std::optional<MaskMap> mask;
};

bool is_geometric(AugKind kind);
std::string kind_name(AugKind kind);
AugKind parse_kind(const std::string& name);
// "name" or "name:param", e.g. "jpeg:80".
AugmentSpec parse_spec(const std::string& text, std::uint64_t seed = 0);
// Comma-separated specs; "combination" expands to jpeg:80,brightness:1.5,crop:0.5.
std::vector<AugmentSpec> parse_chain(const std::string& text, std::uint64_t seed = 0);
std::string spec_label(const AugmentSpec& spec);
std::string chain_label(const std::vector<AugmentSpec>& chain);
std::vector<AugmentSpec> combination_chain(std::uint64_t seed = 0);
void validate(const AugmentSpec& spec);

// The mask, when present, follows every geometric map (bilinear, binarized at 0.5).
// Splice kinds need a background: the unwatermarked original for splice_proportion, any
// same-sized image for splice_collage.
AugResult apply(const ImageBuffer& img, const MaskMap* mask, const AugmentSpec& spec,
                const ImageBuffer* background = nullptr);
AugResult apply_chain(const ImageBuffer& img, const MaskMap* mask, const std::vector<AugmentSpec>& chain,
                      const ImageBuffer* background = nullptr);

ImageBuffer hflip(const ImageBuffer& img);
ImageBuffer adjust_brightness(const ImageBuffer& img, double f);
ImageBuffer adjust_contrast(const ImageBuffer& img, double f);
ImageBuffer adjust_saturation(const ImageBuffer& img, double f);
ImageBuffer adjust_hue(const ImageBuffer& img, double h);
double blur_sigma(int k);
ImageBuffer gaussian_blur(const ImageBuffer& img, int k);
ImageBuffer median_filter(const ImageBuffer& img, int k);

struct SpliceResult {
  ImageBuffer image;
  MaskMap mask;
};
// Pastes a random rectangle of relative area area_fraction (image aspect ratio) from img_wm
// onto background at the same location.
SpliceResult splice(const ImageBuffer& img_wm, const ImageBuffer& background, double area_fraction, CounterRng& rng);

}  // namespace wmseg
