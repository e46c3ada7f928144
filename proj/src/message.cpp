#include "wmseg/message.hpp"

#include <cctype>

#include "wmseg/error.hpp"

namespace wmseg {

Message::Message(int n_bits) {
  if (n_bits < 0) throw ParamError("negative message length");
  bits_.assign(n_bits, 0);
}

Message::Message(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::string Message::to_hex() const {
  static const char* digits = "0123456789abcdef";
  const int n = size();
  std::string out;
  for (int d = 0; d < (n + 3) / 4; ++d) {
    int v = 0;
    for (int b = 0; b < 4; ++b) {
      const int k = 4 * d + b;
      v = (v << 1) | (k < n ? bits_[k] : 0);
    }
    out.push_back(digits[v]);
  }
  return out;
}

Message Message::from_hex(const std::string& hex, int n_bits) {
  if (n_bits < 1) throw ParamError("n_bits must be >= 1");
  std::string h = hex;
  if (h.size() >= 2 && h[0] == '0' && (h[1] == 'x' || h[1] == 'X')) h = h.substr(2);
  if (static_cast<int>(h.size()) != (n_bits + 3) / 4)
    throw ParamError("hex message must have " + std::to_string((n_bits + 3) / 4) + " digits");
  Message m(n_bits);
  for (std::size_t d = 0; d < h.size(); ++d) {
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(h[d])));
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else throw ParamError("invalid hex digit in message");
    for (int b = 0; b < 4; ++b) {
      const int k = 4 * static_cast<int>(d) + b;
      const int bit = (v >> (3 - b)) & 1;
      if (k < n_bits) m.bits_[k] = static_cast<std::uint8_t>(bit);
      else if (bit) throw ParamError("hex message has bits beyond n_bits");
    }
  }
  return m;
}

std::uint64_t Message::packed() const {
  if (size() > kMaxBits) throw ParamError("message longer than 64 bits cannot be packed");
  std::uint64_t v = 0;
  for (auto b : bits_) v = (v << 1) | b;
  return v;
}

Message Message::from_packed(std::uint64_t v, int n_bits) {
  Message m(n_bits);
  for (int k = n_bits - 1; k >= 0; --k) {
    m.bits_[k] = static_cast<std::uint8_t>(v & 1);
    v >>= 1;
  }
  return m;
}

Message Message::from_string(const std::string& bits01) {
  Message m(static_cast<int>(bits01.size()));
  for (std::size_t k = 0; k < bits01.size(); ++k) {
    if (bits01[k] != '0' && bits01[k] != '1') throw ParamError("bit string must contain only 0 and 1");
    m.bits_[k] = bits01[k] == '1';
  }
  return m;
}

std::string Message::to_string() const {
  std::string s;
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

Message Message::random(int n_bits, CounterRng& rng) {
  Message m(n_bits);
  for (int k = 0; k < n_bits; ++k) m.bits_[k] = static_cast<std::uint8_t>(rng.next_u64() >> 63);
  return m;
}

int hamming(const Message& a, const Message& b) {
  if (a.size() != b.size()) throw DataError("message length mismatch");
  int d = 0;
  for (int k = 0; k < a.size(); ++k) d += a[k] != b[k];
  return d;
}

}  // namespace wmseg
