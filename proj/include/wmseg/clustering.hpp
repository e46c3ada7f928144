#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wmseg/codec.hpp"
#include "wmseg/message.hpp"

namespace wmseg {

struct DbscanParams {
  int epsilon = 1;
  std::int64_t min_samples = 1000;
  void validate() const;
};

enum class CentroidRule { majority, medoid };

struct Cluster {
  Message centroid;
  std::vector<std::size_t> members;  // ascending point (or pixel) indices
};

struct ClusterResult {
  std::vector<Cluster> clusters;
  std::vector<std::size_t> noise;
};

struct PixelMessage {
  std::size_t pixel;
  Message msg;
};

// Pixels with y_det > tau, each with bits y_dec > 0.5.
std::vector<PixelMessage> binarize_messages(const ExtractorOutput& out, double tau);

// DBSCAN labels over packed words (Hamming distance): cluster ids in creation order, -1 for noise.
// Points are processed in ascending index order.
std::vector<int> dbscan_labels(const std::vector<std::uint64_t>& words, int n_bits, const DbscanParams& params);

Message centroid(const std::vector<Message>& members, CentroidRule rule = CentroidRule::majority);

// Clusters ordered by descending member count, ties by centroid value ascending.
ClusterResult dbscan(const std::vector<Message>& points, const DbscanParams& params,
                     CentroidRule rule = CentroidRule::majority);
ClusterResult decode_multi(const ExtractorOutput& out, double tau, const DbscanParams& params,
                           CentroidRule rule = CentroidRule::majority);

// Per-pixel codes: cluster index, 255 for noise, 254 for pixels that were not selected.
Raster assignment_codes(const ClusterResult& result, int height, int width);

}  // namespace wmseg
