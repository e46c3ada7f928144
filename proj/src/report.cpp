#include "wmseg/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wmseg/error.hpp"
#include "wmseg/raster_io.hpp"

namespace wmseg {

void ReportRow::set(const std::string& name, double value) {
  for (auto& [k, v] : metrics)
    if (k == name) {
      v = value;
      return;
    }
  metrics.emplace_back(name, value);
}

double ReportRow::get(const std::string& name) const {
  for (const auto& [k, v] : metrics)
    if (k == name) return v;
  throw DataError("report row " + label + " has no metric " + name);
}

bool ReportRow::has(const std::string& name) const {
  for (const auto& kv : metrics)
    if (kv.first == name) return true;
  return false;
}

void EvalReport::param(const std::string& name, const std::string& value) { params.emplace_back(name, value); }

const ReportRow& EvalReport::row(const std::string& label) const {
  for (const auto& r : rows)
    if (r.label == label) return r;
  throw DataError("report has no row " + label);
}

nlohmann::json metric_json(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["protocol"] = protocol;
  j["corpus"] = {{"id", corpus_id}, {"size", corpus_size}};
  j["seed"] = seed;
  nlohmann::json p = nlohmann::json::object();
  for (const auto& [k, v] : params) p[k] = v;
  j["params"] = p;
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json m = nlohmann::json::object();
    for (const auto& [k, v] : r.metrics) m[k] = metric_json(v);
    rs.push_back({{"label", r.label}, {"metrics", m}});
  }
  j["rows"] = rs;
  j["notes"] = notes;
  return j;
}

namespace {
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}
}  // namespace

std::string EvalReport::to_csv() const {
  std::vector<std::string> cols;
  for (const auto& r : rows)
    for (const auto& kv : r.metrics)
      if (std::find(cols.begin(), cols.end(), kv.first) == cols.end()) cols.push_back(kv.first);
  std::ostringstream os;
  os << "label";
  for (const auto& c : cols) os << "," << csv_field(c);
  os << "\n";
  for (const auto& r : rows) {
    os << csv_field(r.label);
    for (const auto& c : cols) {
      os << ",";
      if (!r.has(c)) continue;
      const double v = r.get(c);
      if (std::isnan(v)) continue;
      if (std::isinf(v)) {
        os << (v > 0 ? "inf" : "-inf");
      } else {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        os << buf;
      }
    }
    os << "\n";
  }
  return os.str();
}

void EvalReport::write_json(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  f << to_json().dump(2) << "\n";
  if (!f) throw IoError("cannot write " + path);
}

void EvalReport::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  f << to_csv();
  if (!f) throw IoError("cannot write " + path);
}

std::string corpus_hash(const std::vector<ImageBuffer>& images) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](unsigned char b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  for (const auto& img : images) {
    for (int s : {img.height, img.width})
      for (int b = 0; b < 4; ++b) feed(static_cast<unsigned char>(s >> (8 * b)));
    for (double v : img.data) feed(quantize8(v));
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace wmseg
