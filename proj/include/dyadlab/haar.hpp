#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dyadlab/grid.hpp"

namespace dyadlab {

// Wilson tree index over a cube's 2^d children: heap node alpha = 2^j + p for
// a child-offset prefix p of j bits, 1 <= alpha <= 2^d - 1.  Node alpha owns
// the children whose first j offset bits equal p; its halves are the nodes
// 2*alpha (prefix bit 0) and 2*alpha + 1 (prefix bit 1).
using AlphaIndex = uint32_t;

inline int alpha_depth(AlphaIndex a) { return std::bit_width(a) - 1; }

// |E_{alpha,I}| for I at `level`: 2^{-depth(alpha)} * |I|.
inline double set_measure(const GridSpec& g, int level, AlphaIndex alpha) {
  return std::ldexp(1.0, -(alpha_depth(alpha) + g.d * level));
}
inline int64_t set_cell_count(const GridSpec& g, int level, AlphaIndex alpha) {
  return int64_t(1) << (g.d * (g.L - level) - alpha_depth(alpha));
}

// Raw per-level sums of cell values over cubes, morton order; level L holds
// the cells themselves.  Parent sums fold children in lexicographic offset
// order, so cube sum == left-fold of child sums bitwise.
struct CubeSumCache {
  GridSpec grid;
  std::vector<std::vector<double>> sums;  // sums[level][morton]

  CubeSumCache() = default;
  explicit CubeSumCache(const StepFunction& f);

  double cell_sum(int level, uint64_t morton) const { return sums[size_t(level)][size_t(morton)]; }
  double integral_cube(int level, uint64_t morton) const {
    return cell_sum(level, morton) * grid.cell_measure();
  }
  double average_cube(int level, uint64_t morton) const {
    return cell_sum(level, morton) / double(int64_t(1) << (grid.d * (grid.L - level)));
  }

  // Heap reduction of the 2^d child sums of cube (level, morton); level < L.
  // ns must hold 2*fanout entries; ns[fanout + o] = child o sum, internal
  // ns[a] = ns[2a] + ns[2a+1].  Wilson-set sums read off as ns[alpha].
  void node_sums(int level, uint64_t morton, double* ns) const;

  double set_sum(int level, uint64_t morton, AlphaIndex alpha) const;
  double integral_set(int level, uint64_t morton, AlphaIndex alpha) const {
    return set_sum(level, morton, alpha) * grid.cell_measure();
  }
  double average_set(int level, uint64_t morton, AlphaIndex alpha) const {
    return set_sum(level, morton, alpha) / double(set_cell_count(grid, level, alpha));
  }
};

// Coefficients against the orthonormal system indexed by pairs (cube, alpha),
// cube levels 0..L-1, plus the separately held global mean.  Layout follows
// pair_index: level-major, cube morton, alpha ascending.
struct HaarSpectrum {
  GridSpec grid;
  double mean = 0.0;
  std::vector<double> coeffs;

  double& at(const GridTables& t, int level, uint64_t morton, AlphaIndex alpha) {
    return coeffs[size_t(pair_index(t, level, morton, alpha))];
  }
  double at(const GridTables& t, int level, uint64_t morton, AlphaIndex alpha) const {
    return coeffs[size_t(pair_index(t, level, morton, alpha))];
  }
};

HaarSpectrum analyze(const StepFunction& f);
HaarSpectrum analyze(const CubeSumCache& cache);
StepFunction synthesize(const HaarSpectrum& s);
HaarSpectrum zero_spectrum(const GridSpec& g);

// Averages <f>_S = (1/|S|) integral_S f.
double average(const CubeSumCache& c, const Cube& cube);
double average(const CubeSumCache& c, const Cube& cube, AlphaIndex alpha);
// half: 1 or 2, the prefix-bit-0 / prefix-bit-1 half of E_{alpha,cube}.
double average_half(const CubeSumCache& c, const Cube& cube, AlphaIndex alpha, int half);

// Sums over nested pairs.  For q indexed by pairs, half1[p] / half2[p] hold
// sum of q over every pair whose set lies inside the first / second half of
// E_p.  The inclusive nested sum over E_{q'} subset-of E_p is then
// q[p] + half1[p] + half2[p]; laminarity makes the split exhaustive.
struct NestedHalfSums {
  std::vector<double> half1, half2;
};
NestedHalfSums nested_half_sums(const GridSpec& g, const std::vector<double>& q);
std::vector<double> nested_inclusive_sums(const GridSpec& g, const std::vector<double>& q);

}  // namespace dyadlab
