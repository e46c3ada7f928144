#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace wmseg {

struct WatermarkKey {
  std::array<std::uint8_t, 32> seed{};
  int n_bits = 32;
  int tile = 8;

  // Deterministic key for tests and reproducible runs.
  static WatermarkKey from_u64(std::uint64_t s, int n_bits = 32, int tile = 8);
  // Seed drawn from the system CSPRNG.
  static WatermarkKey generate(int n_bits = 32, int tile = 8);
  void validate() const;
  bool operator==(const WatermarkKey& o) const = default;
};

// 64-bit output of BLAKE2b keyed by the key seed over (domain, a, b).
std::uint64_t keyed_hash(const WatermarkKey& key, std::uint64_t domain, std::uint64_t a, std::uint64_t b);

// The n_bits + 1 carrier tiles of a key. Index 0 is the synchronization carrier.
class CarrierBank {
 public:
  explicit CarrierBank(const WatermarkKey& key);

  int tile() const { return tile_; }
  int count() const { return static_cast<int>(tiles_.size()); }
  int at(int k, int i, int j) const {
    const int ti = ((i % tile_) + tile_) % tile_, tj = ((j % tile_) + tile_) % tile_;
    return tiles_[k][ti * tile_ + tj];
  }
  const std::vector<std::int8_t>& pattern(int k) const { return tiles_[k]; }
  bool orthogonal() const { return orthogonal_; }

 private:
  int tile_;
  bool orthogonal_ = false;
  std::vector<std::vector<std::int8_t>> tiles_;
};

// Carrier value in {-1,+1} for bit index k in [0, n_bits] at pixel (i, j).
int keyed_carrier(const WatermarkKey& key, int k, int i, int j);

// Binary key file: "WMKY", u32 version, u32 n_bits, u32 tile, 32-byte seed (little-endian).
void write_key_file(const WatermarkKey& key, const std::string& path);
WatermarkKey read_key_file(const std::string& path);

}  // namespace wmseg
