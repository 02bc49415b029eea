// Deterministic RNG for actor behavior. std::uniform_*_distribution is
// implementation-defined, so bounded draws are spelled out here to keep runs
// bit-identical across platforms.

#pragma once

#include <cstdint>

namespace mpsim {

// SplitMix64 (Steele, Lea, Flood 2014). One stream per actor keeps decision
// order independent of how other actors interleave.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound) via 128-bit multiply; bias < 2^-64, acceptable for
  // behavioral draws (the selection path uses the beacon, not this).
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  // Uniform double in [0, 1) with 53 bits of the draw.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool chance(double p) { return next_unit() < p; }

 private:
  std::uint64_t state_;
};

// Stable derivation of per-actor substreams from the scenario seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt) {
  Rng r(master ^ (salt * 0x9e3779b97f4a7c15ULL + 0x711a9f4c3b82d1e5ULL));
  r.next_u64();
  return r.next_u64();
}

}  // namespace mpsim
