#pragma once

#include <cstdint>
#include <string_view>

namespace hdlg {

// FNV-1a, 64-bit. The optional seed is XORed into the offset basis so that
// seed 0 yields the reference FNV-1a values.
inline uint64_t fnv1a64(std::string_view data, uint64_t seed = 0) {
  uint64_t h = 14695981039346656037ull ^ seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// splitmix64: deterministic stream used for fixed projection weights.
struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // Uniform in [0, 1).
  double nextUnit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace hdlg
