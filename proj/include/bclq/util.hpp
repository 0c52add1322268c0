#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bclq {

inline bool is_pow2(uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

inline uint32_t ilog2(uint64_t x) {
  if (!is_pow2(x)) throw std::invalid_argument("ilog2: not a power of two");
  uint32_t r = 0;
  while (x > 1) { x >>= 1; ++r; }
  return r;
}

// SplitMix64 finalizer; the workhorse behind all counter-based randomness.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline uint64_t mix64(uint64_t a, uint64_t b) { return mix64(mix64(a) ^ b); }

// Small counter-based generator. Streams derived from (seed, stream id) are
// independent of thread scheduling, which keeps every experiment reproducible
// no matter how trials are distributed over workers.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(mix64(seed)) {}
  Rng(uint64_t seed, uint64_t stream) : state_(mix64(mix64(seed) ^ stream)) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // unbiased integer in [0, bound)
  uint64_t below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below(0)");
    uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  bool coin() { return next() >> 63; }

  double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

}  // namespace bclq
