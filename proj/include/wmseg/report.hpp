#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "wmseg/image.hpp"

namespace wmseg {

struct ReportRow {
  std::string label;
  std::vector<std::pair<std::string, double>> metrics;  // NaN means undefined

  void set(const std::string& name, double value);
  double get(const std::string& name) const;
  bool has(const std::string& name) const;
};

struct EvalReport {
  std::string protocol;
  std::string corpus_id;
  std::size_t corpus_size = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;

  void param(const std::string& name, const std::string& value);
  const ReportRow& row(const std::string& label) const;
  nlohmann::json to_json() const;
  // One line per row; columns are the union of metric names in first-seen order.
  std::string to_csv() const;
  void write_json(const std::string& path) const;
  void write_csv(const std::string& path) const;
};

// Metric value for JSON: NaN becomes null, infinities become "inf"/"-inf".
nlohmann::json metric_json(double v);

// FNV-1a over the 8-bit quantized samples and dimensions of every image.
std::string corpus_hash(const std::vector<ImageBuffer>& images);

}  // namespace wmseg
