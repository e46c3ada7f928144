#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wmseg/augment.hpp"
#include "wmseg/clustering.hpp"
#include "wmseg/codec.hpp"
#include "wmseg/postproc.hpp"
#include "wmseg/report.hpp"

namespace wmseg {

enum class Protocol { localization, multiwm, robustness, dbscan_grid };
Protocol parse_protocol(const std::string& name);
std::string protocol_name(Protocol p);

struct CodecSettings {
  EmbedConfig embed;
  ExtractConfig extract;
  static CodecSettings for_key(const WatermarkKey& key);
};

struct HarnessOptions {
  std::uint64_t seed = 1;
  int jobs = 0;  // 0: hardware concurrency
  double tau = 0.5;
  double tau_image = kDefaultTauImage;
  // When non-empty, predicted masks (and cluster assignments for multiwm) are written here as PGM.
  std::string dump_dir;
};

// Runs fn(i) for i in [0, n) on a worker pool; results must be written by index.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// Centered rectangle covering the given area fraction: sides floor(sqrt(f) * dim).
MaskMap centered_rect(int h, int w, double fraction);

// Checkerboard anchors (row, col) on a 256 x 256 canvas.
constexpr std::array<std::array<int, 2>, 5> kCheckerAnchors{{{64, 64}, {64, 192}, {192, 64}, {192, 192}, {128, 128}}};
// k squares of side floor(256 * sqrt(0.1)) = 80 centered at the first k anchors. The center square
// overlaps the corner squares by 16 x 16; a later square owns the shared pixels, so masks are disjoint.
std::vector<MaskMap> checkerboard_masks(int k);

// Applies the spatial part of a chain to a mask (valuemetric steps leave it unchanged).
MaskMap transform_mask(const MaskMap& mask, const std::vector<AugmentSpec>& chain);

EvalReport run_localization(const std::vector<ImageBuffer>& corpus, const CodecSettings& codec,
                            const std::vector<double>& fractions, bool with_crop, const HarnessOptions& opt);

struct MultiwmResult {
  std::size_t images = 0;
  std::size_t exact_k = 0;            // images with exactly k clusters
  double mean_clusters = 0.0;
  double bit_accuracy = 0.0;          // mean over found clusters
  std::size_t clusters_scored = 0;
  double miou_mean = 0.0;
  double miou_min = 1.0;
};

struct DbscanGridPoint {
  int epsilon;
  std::int64_t min_samples;
};

EvalReport run_multiwm(const std::vector<ImageBuffer>& corpus, const CodecSettings& codec, int n_messages,
                       const std::vector<AugmentSpec>& chain, const DbscanParams& dbscan, const HarnessOptions& opt,
                       MultiwmResult* summary = nullptr);

// Robustness sweep: positives are embedded with a random message under a full mask, negatives are
// left untouched. An empty positive set reports FPR only.
EvalReport run_robustness(const std::vector<ImageBuffer>& positives, const std::vector<ImageBuffer>& negatives,
                          const CodecSettings& codec, const std::vector<std::vector<AugmentSpec>>& augs,
                          const HarnessOptions& opt);
std::vector<std::vector<AugmentSpec>> default_robustness_augs(std::uint64_t seed = 0);

EvalReport run_dbscan_grid(const std::vector<ImageBuffer>& corpus, const CodecSettings& codec,
                           const std::vector<int>& eps_list, const std::vector<std::int64_t>& min_samples_list,
                           const std::vector<AugmentSpec>& chain, const HarnessOptions& opt);

// Pooled y_det of clean images, then calibrate_tau.
double calibrate_on(const std::vector<ImageBuffer>& negatives, const ExtractConfig& cfg, double target_fpr,
                    int jobs = 0);

}  // namespace wmseg
