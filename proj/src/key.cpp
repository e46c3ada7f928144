#include "wmseg/key.hpp"

#include <sodium.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <mutex>
#include <numeric>

#include "wmseg/error.hpp"
#include "wmseg/message.hpp"

namespace wmseg {

namespace {

void ensure_sodium() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
  });
}

void put_u64(unsigned char* p, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) p[b] = static_cast<unsigned char>(v >> (8 * b));
}

void put_u32(unsigned char* p, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) p[b] = static_cast<unsigned char>(v >> (8 * b));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int b = 3; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

constexpr std::uint64_t kDomainRows = 1;
constexpr std::uint64_t kDomainPerm = 2;
constexpr std::uint64_t kDomainSign = 3;
constexpr std::uint64_t kDomainRandomTile = 4;

// Fisher-Yates driven by the keyed hash.
template <class T>
void keyed_shuffle(const WatermarkKey& key, std::uint64_t domain, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::uint64_t r = keyed_hash(key, domain, i, 0);
    std::swap(v[i - 1], v[r % i]);
  }
}

double tile_corr(const std::vector<std::int8_t>& a, const std::vector<std::int8_t>& b) {
  long s = 0;
  for (std::size_t p = 0; p < a.size(); ++p) s += a[p] * b[p];
  return static_cast<double>(s) / static_cast<double>(a.size());
}

}  // namespace

WatermarkKey WatermarkKey::from_u64(std::uint64_t s, int n_bits, int tile) {
  WatermarkKey k;
  k.n_bits = n_bits;
  k.tile = tile;
  std::uint64_t z = s;
  for (int w = 0; w < 4; ++w) {
    z = mix64(z + 0x9E3779B97F4A7C15ULL);
    put_u64(k.seed.data() + 8 * w, z);
  }
  k.validate();
  return k;
}

WatermarkKey WatermarkKey::generate(int n_bits, int tile) {
  ensure_sodium();
  WatermarkKey k;
  k.n_bits = n_bits;
  k.tile = tile;
  randombytes_buf(k.seed.data(), k.seed.size());
  k.validate();
  return k;
}

void WatermarkKey::validate() const {
  if (tile < 4) throw ParamError("key tile must be >= 4");
  if (n_bits < 1 || n_bits > kMaxBits) throw ParamError("key n_bits must be in [1, 64]");
  if (n_bits + 2 > tile * tile) throw ParamError("key tile too small for n_bits carriers");
}

std::uint64_t keyed_hash(const WatermarkKey& key, std::uint64_t domain, std::uint64_t a, std::uint64_t b) {
  ensure_sodium();
  unsigned char in[24];
  put_u64(in, domain);
  put_u64(in + 8, a);
  put_u64(in + 16, b);
  unsigned char out[8];
  crypto_generichash(out, sizeof out, in, sizeof in, key.seed.data(), key.seed.size());
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | out[i];
  return v;
}

CarrierBank::CarrierBank(const WatermarkKey& key) : tile_(key.tile) {
  key.validate();
  const int n = tile_ * tile_;
  const int count = key.n_bits + 1;
  tiles_.assign(count, std::vector<std::int8_t>(n));

  if ((n & (n - 1)) == 0 && count <= n - 1) {
    // Rows of a Sylvester-Hadamard matrix under a keyed row choice, position permutation and sign.
    orthogonal_ = true;
    std::vector<int> rows(n - 1);
    std::iota(rows.begin(), rows.end(), 1);
    keyed_shuffle(key, kDomainRows, rows);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    keyed_shuffle(key, kDomainPerm, perm);
    for (int k = 0; k < count; ++k) {
      const int sign = (keyed_hash(key, kDomainSign, k, 0) & 1) ? -1 : 1;
      for (int p = 0; p < n; ++p) {
        const int h = (std::popcount(static_cast<unsigned>(rows[k] & perm[p])) & 1) ? -1 : 1;
        tiles_[k][p] = static_cast<std::int8_t>(sign * h);
      }
    }
    return;
  }

  // Rejection sampling from seed||counter until balanced and weakly correlated with earlier carriers.
  constexpr int kMaxAttempts = 200000;
  for (int k = 0; k < count; ++k) {
    bool ok = false;
    for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
      auto& t = tiles_[k];
      for (int p = 0; p < n; p += 64) {
        const std::uint64_t bits = keyed_hash(key, kDomainRandomTile, static_cast<std::uint64_t>(k) << 32 | attempt, p);
        for (int q = p; q < std::min(n, p + 64); ++q) t[q] = ((bits >> (q - p)) & 1) ? 1 : -1;
      }
      const double mean = std::accumulate(t.begin(), t.end(), 0.0) / n;
      ok = std::abs(mean) <= 0.25;
      for (int l = 0; l < k && ok; ++l) ok = std::abs(tile_corr(t, tiles_[l])) <= 0.15;
    }
    if (!ok) throw ParamError("cannot construct weakly correlated carriers for this tile size");
  }
}

int keyed_carrier(const WatermarkKey& key, int k, int i, int j) {
  static std::mutex mu;
  static WatermarkKey cached_key;
  static std::shared_ptr<const CarrierBank> cached;
  std::shared_ptr<const CarrierBank> bank;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (!cached || !(cached_key == key)) {
      cached = std::make_shared<const CarrierBank>(key);
      cached_key = key;
    }
    bank = cached;
  }
  if (k < 0 || k >= bank->count()) throw ParamError("carrier index out of range");
  return bank->at(k, i, j);
}

void write_key_file(const WatermarkKey& key, const std::string& path) {
  key.validate();
  unsigned char buf[48];
  std::memcpy(buf, "WMKY", 4);
  put_u32(buf + 4, 1);
  put_u32(buf + 8, static_cast<std::uint32_t>(key.n_bits));
  put_u32(buf + 12, static_cast<std::uint32_t>(key.tile));
  std::memcpy(buf + 16, key.seed.data(), 32);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write key file: " + path);
  f.write(reinterpret_cast<const char*>(buf), sizeof buf);
  if (!f) throw IoError("cannot write key file: " + path);
}

WatermarkKey read_key_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read key file: " + path);
  unsigned char buf[48];
  f.read(reinterpret_cast<char*>(buf), sizeof buf);
  if (f.gcount() != static_cast<std::streamsize>(sizeof buf) || std::memcmp(buf, "WMKY", 4) != 0)
    throw DataError("not a key file: " + path);
  if (get_u32(buf + 4) != 1) throw DataError("unsupported key file version: " + path);
  WatermarkKey key;
  key.n_bits = static_cast<int>(get_u32(buf + 8));
  key.tile = static_cast<int>(get_u32(buf + 12));
  std::memcpy(key.seed.data(), buf + 16, 32);
  try {
    key.validate();
  } catch (const ParamError& e) {
    throw DataError(std::string("invalid key file: ") + e.what());
  }
  return key;
}

}  // namespace wmseg
