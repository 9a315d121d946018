#pragma once

#include <cstdint>

namespace qac {

// splitmix64, used for seeding and for deriving independent streams.
struct SplitMix64 {
  uint64_t state;

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

// Derives a stream seed from a master seed and a stream index. Every consumer
// of randomness in the project builds its generator through this, so results
// are a pure function of (master seed, stream path).
inline uint64_t derive_seed(uint64_t master, uint64_t stream) {
  SplitMix64 sm{master + 0x9e3779b97f4a7c15ULL * (stream + 1)};
  return sm.next();
}

// xoshiro256++ (Blackman & Vigna). One instance per sampler read / decode
// stream; the SIMD kernels run four of these side by side in vector lanes.
struct Xoshiro256pp {
  uint64_t s[4];

  static Xoshiro256pp seeded(uint64_t seed) {
    SplitMix64 sm{seed};
    Xoshiro256pp g{};
    for (auto& w : g.s) w = sm.next();
    return g;
  }

  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t next() {
    uint64_t result = rotl(s[0] + s[3], 23) + s[0];
    uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform ±1.
  int8_t next_sign() { return (next() >> 63) ? int8_t{-1} : int8_t{1}; }

  // Uniform integer in [0, bound) by rejection; bound >= 1.
  uint64_t next_below(uint64_t bound) {
    uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }
};

}  // namespace qac
