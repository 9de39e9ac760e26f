#pragma once

#include <cstdint>

namespace infnoise {

// SplitMix64 (Steele/Lea/Flood). 64-bit state, full-period, trivially
// splittable: every sampler in this library derives per-row substreams
// from (seed, row index) so that parallel generation is bit-identical
// to serial generation.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53-bit mantissa.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Stable substream derivation. This mapping is part of the on-disk
// determinism contract (trial seeds, per-row streams) and must not change.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// One independent random stream with the scalar distributions the
// samplers need. Deterministic given its seed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

  static RandomStream substream(std::uint64_t seed, std::uint64_t index) {
    return RandomStream(derive_seed(seed, index));
  }

  double uniform();       // [0, 1)
  double uniform_open();  // (0, 1)
  double normal();        // standard normal, Box-Muller with cached spare
  double exponential();   // rate 1
  double gamma(double shape);  // unit scale, Marsaglia-Tsang
  double rademacher();    // +/-1 with equal probability

 private:
  SplitMix64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace infnoise
