#include "wmseg/raster_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "wmseg/error.hpp"

namespace wmseg {

namespace {

struct Bytes8 {
  int height = 0, width = 0, channels = 0;
  std::vector<unsigned char> px;  // interleaved
};

std::string lower_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string e = path.substr(dot + 1);
  for (auto& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e;
}

Bytes8 read_png(const std::string& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw IoError("cannot read PNG " + path + ": " + image.message);
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw DataError("unsupported bit depth (>8) in " + path);
  }
  Bytes8 out;
  out.height = static_cast<int>(image.height);
  out.width = static_cast<int>(image.width);
  const bool color = image.format & PNG_FORMAT_FLAG_COLOR;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  out.channels = color ? 3 : 1;
  out.px.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.px.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError("cannot decode PNG " + path + ": " + msg);
  }
  return out;
}

void write_png(const Bytes8& b, const std::string& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(b.width);
  image.height = static_cast<png_uint_32>(b.height);
  image.format = b.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, b.px.data(), 0, nullptr))
    throw IoError("cannot write PNG " + path + ": " + image.message);
}

// Skips whitespace and '#' comments, then parses a decimal integer.
int pnm_int(std::istream& in, const std::string& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF || !std::isdigit(c)) throw DataError("malformed PNM header in " + path);
  long v = 0;
  while (c != EOF && std::isdigit(c)) {
    v = v * 10 + (c - '0');
    if (v > (1L << 30)) throw DataError("PNM header value too large in " + path);
    c = in.get();
  }
  return static_cast<int>(v);
}

Bytes8 read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[2];
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
    throw DataError("unsupported PNM variant in " + path);
  Bytes8 out;
  out.channels = magic[1] == '6' ? 3 : 1;
  out.width = pnm_int(in, path);
  out.height = pnm_int(in, path);
  const int maxval = pnm_int(in, path);
  if (maxval > 255) throw DataError("unsupported bit depth (>8) in " + path);
  if (maxval < 1) throw DataError("invalid PNM maxval in " + path);
  out.px.resize(static_cast<std::size_t>(out.width) * out.height * out.channels);
  in.read(reinterpret_cast<char*>(out.px.data()), static_cast<std::streamsize>(out.px.size()));
  if (in.gcount() != static_cast<std::streamsize>(out.px.size())) throw IoError("truncated PNM data in " + path);
  if (maxval != 255)
    for (auto& p : out.px) p = static_cast<unsigned char>(std::lround(p * 255.0 / maxval));
  return out;
}

void write_pnm(const Bytes8& b, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << (b.channels == 3 ? "P6" : "P5") << "\n" << b.width << " " << b.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(b.px.data()), static_cast<std::streamsize>(b.px.size()));
  if (!out) throw IoError("cannot write " + path);
}

Bytes8 read_any(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open " + path);
  unsigned char sig[8] = {};
  probe.read(reinterpret_cast<char*>(sig), 8);
  const auto got = probe.gcount();
  probe.close();
  if (got == 8 && png_sig_cmp(sig, 0, 8) == 0) return read_png(path);
  if (got >= 2 && sig[0] == 'P') return read_pnm(path);
  throw DataError("unsupported raster format: " + path);
}

void write_any(const Bytes8& b, const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == "png") return write_png(b, path);
  if (ext == "ppm" || ext == "pgm" || ext == "pnm") return write_pnm(b, path);
  throw IoError("unsupported output extension: " + path);
}

double luma_of(const Bytes8& b, std::size_t p) {
  return 0.299 * b.px[3 * p] + 0.587 * b.px[3 * p + 1] + 0.114 * b.px[3 * p + 2];
}

}  // namespace

unsigned char quantize8(double s) {
  const double v = std::round(s * 255.0);  // std::round is half away from zero
  return static_cast<unsigned char>(std::clamp(v, 0.0, 255.0));
}

ImageBuffer load_image(const std::string& path) {
  const Bytes8 b = read_any(path);
  ImageBuffer img(b.height, b.width);
  const std::size_t n = img.plane_size();
  for (int c = 0; c < 3; ++c) {
    double* dst = img.plane(c);
    for (std::size_t p = 0; p < n; ++p) dst[p] = b.px[p * b.channels + (b.channels == 3 ? c : 0)] / 255.0;
  }
  return img;
}

void save_image(const ImageBuffer& img, const std::string& path) {
  Bytes8 b;
  b.height = img.height;
  b.width = img.width;
  const std::size_t n = img.plane_size();
  if (lower_ext(path) == "pgm") {
    b.channels = 1;
    b.px.resize(n);
    for (std::size_t p = 0; p < n; ++p)
      b.px[p] = quantize8(0.299 * img.plane(0)[p] + 0.587 * img.plane(1)[p] + 0.114 * img.plane(2)[p]);
  } else {
    b.channels = 3;
    b.px.resize(3 * n);
    for (std::size_t p = 0; p < n; ++p)
      for (int c = 0; c < 3; ++c) b.px[3 * p + c] = quantize8(img.plane(c)[p]);
  }
  write_any(b, path);
}

Raster load_gray(const std::string& path) {
  const Bytes8 b = read_any(path);
  Raster r(b.height, b.width);
  for (std::size_t p = 0; p < r.size(); ++p) r.data[p] = (b.channels == 1 ? b.px[p] : luma_of(b, p)) / 255.0;
  return r;
}

void save_gray(const Raster& r, const std::string& path) {
  Bytes8 b;
  b.height = r.height;
  b.width = r.width;
  b.channels = 1;
  b.px.resize(r.size());
  for (std::size_t p = 0; p < r.size(); ++p) b.px[p] = quantize8(r.data[p]);
  write_any(b, path);
}

void save_codes(const Raster& codes, const std::string& path) {
  Bytes8 b;
  b.height = codes.height;
  b.width = codes.width;
  b.channels = 1;
  b.px.resize(codes.size());
  for (std::size_t p = 0; p < codes.size(); ++p)
    b.px[p] = static_cast<unsigned char>(std::clamp(std::round(codes.data[p]), 0.0, 255.0));
  write_any(b, path);
}

MaskMap load_mask(const std::string& path) { return load_gray(path); }

void save_mask(const MaskMap& m, const std::string& path) { save_gray(m, path); }

}  // namespace wmseg
