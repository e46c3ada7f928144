#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wmseg/rng.hpp"

namespace wmseg {

constexpr int kMaxBits = 64;

// Fixed-length bit vector. Bit 1 (index 0) is the most significant bit of the hex form.
class Message {
 public:
  Message() = default;
  explicit Message(int n_bits);
  explicit Message(std::vector<std::uint8_t> bits);

  int size() const { return static_cast<int>(bits_.size()); }
  std::uint8_t operator[](int k) const { return bits_[k]; }
  void set(int k, bool v) { bits_[k] = v ? 1 : 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  // +1 for bit 1, -1 for bit 0.
  int sign(int k) const { return bits_[k] ? 1 : -1; }

  std::string to_hex() const;
  static Message from_hex(const std::string& hex, int n_bits);
  // Bits packed so that index 0 is the most significant of the n_bits-wide value.
  std::uint64_t packed() const;
  static Message from_packed(std::uint64_t v, int n_bits);
  static Message from_string(const std::string& bits01);
  std::string to_string() const;
  static Message random(int n_bits, CounterRng& rng);

  bool operator==(const Message& o) const { return bits_ == o.bits_; }
  bool operator!=(const Message& o) const { return bits_ != o.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
};

int hamming(const Message& a, const Message& b);

}  // namespace wmseg
