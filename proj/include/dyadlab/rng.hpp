#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dyadlab {

// Deterministic draws built from raw mt19937_64 words so sequences do not
// depend on the standard library's distribution internals.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(uint64_t seed) : eng(seed) {}

  uint64_t word() { return eng(); }
  double unit() { return double(eng() >> 11) * 0x1p-53; }  // [0,1)
  double uniform(double a, double b) { return a + (b - a) * unit(); }
  double pm1() { return (eng() & 1u) ? 1.0 : -1.0; }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
};

// splitmix64 step; chains a master seed with purpose/index tags.
inline uint64_t mix_seed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
inline uint64_t mix_seed(uint64_t master, uint64_t purpose, uint64_t index = 0) {
  return mix_seed(mix_seed(master ^ 0x517cc1b727220a95ull * purpose) + index);
}

}  // namespace dyadlab
