#pragma once

#include <cstdint>
#include <random>

namespace dirfuzz {

// Seeded random source with hand-rolled derivations. std::*_distribution is
// implementation-defined, which would break bit-reproducibility of recorded
// campaigns across toolchains, so everything derives from raw mt19937_64
// output.
class Rng {
public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, n). Modulo bias is below 1e-15 for the set sizes used
  // here.
  size_t uniform_index(size_t n) { return static_cast<size_t>(next_u64() % n); }

  // Uniform in [lo, hi] inclusive.
  uint64_t uniform_range(uint64_t lo, uint64_t hi) {
    return lo + next_u64() % (hi - lo + 1);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool chance(double p) { return uniform_real() < p; }

private:
  std::mt19937_64 engine_;
};

}  // namespace dirfuzz
