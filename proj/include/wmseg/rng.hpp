#pragma once

#include <cstdint>

namespace wmseg {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

// Counter-based generator: output n is mix64(seed + n * golden). Portable and stateless
// apart from the counter, so streams can be forked deterministically.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  // Uniform in [0,1) with 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer in [lo, hi] inclusive, unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool bernoulli(double p);
  // Standard normal via Box-Muller on two uniforms.
  double normal();

  // Independent child stream keyed by a label.
  CounterRng fork(std::uint64_t label) const;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace wmseg
