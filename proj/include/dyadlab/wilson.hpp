#pragma once

#include <string>
#include <vector>

#include "dyadlab/grid.hpp"
#include "dyadlab/haar.hpp"

namespace dyadlab {

// One node of the binary tree over a cube's children: E1/E2 list the child
// offsets in each half, lexicographic.  E = E1 union E2 is the set the Haar
// function at (cube, alpha) lives on.
struct WilsonSet {
  Cube cube;
  AlphaIndex alpha = 1;
  std::vector<uint32_t> e1, e2;
  double measure = 0.0;  // |E1 union E2|
};

// All 2^d - 1 sets of a cube, alpha ascending.  Throws
// std::invalid_argument("leaf cube has no children in grid") at level L.
std::vector<WilsonSet> build_wilson_sets(const GridSpec& g, const Cube& cube);

std::string offset_bits(int d, uint32_t offset);  // "010" style, coord 0 first

// Lightweight pair handle used by kernels; morton must match cube level.
struct PairRef {
  int level = 0;
  uint64_t morton = 0;
  AlphaIndex alpha = 1;
};
PairRef pair_ref(const GridSpec& g, const Cube& cube, AlphaIndex alpha);

// Set containment E_inner subset-of E_outer; equality only for identical pairs.
bool set_contains(const GridSpec& g, const PairRef& outer, const PairRef& inner);
inline bool set_strictly_contains(const GridSpec& g, const PairRef& outer, const PairRef& inner) {
  return !(outer.level == inner.level && outer.morton == inner.morton &&
           outer.alpha == inner.alpha) &&
         set_contains(g, outer, inner);
}

// Value of the unit-weight Haar function at `big` on the strictly contained
// set `small` (it is constant there): -1/sqrt|E_big| on the first half,
// +1/sqrt|E_big| on the second.  Throws unless strictly nested.
double haar_value_on_set(const GridSpec& g, const PairRef& big, const PairRef& small);

// Unit-weight Haar function: -1/sqrt|E| on E1, +1/sqrt|E| on E2, zero off E.
StepFunction haar_function(const GridSpec& g, const Cube& cube, AlphaIndex alpha);

// Weight-adapted Haar function: values -sqrt(w(E2)/(w(E1) w(E))) on E1 and
// +sqrt(w(E1)/(w(E2) w(E))) on E2; unit norm and mean zero in L2(w).
// Throws std::invalid_argument("degenerate weighted Haar") if either half
// carries no mass.
StepFunction haar_function(const CubeSumCache& w, const Cube& cube, AlphaIndex alpha);
StepFunction haar_function(const StepFunction& w, const Cube& cube, AlphaIndex alpha);

// L1-normalized indicator h1 = 1_E / |E| of the set at (cube, alpha).
StepFunction set_indicator_l1(const GridSpec& g, const Cube& cube, AlphaIndex alpha);

// Reconstruction coefficients of the unit Haar function in terms of the
// weighted one: h = C * h^w + D * h1_E, with
//   C = sqrt(<w>_{E1} <w>_{E2} / <w>_E),  D = w_hat / <w>_E.
struct Disbalance {
  double C = 1.0, D = 0.0;
};
Disbalance disbalanced_coeffs(const CubeSumCache& w, const Cube& cube, AlphaIndex alpha);
Disbalance disbalanced_coeffs(const StepFunction& w, const Cube& cube, AlphaIndex alpha);

// Pointwise product collapse for strictly nested supports:
// h_small * h_big == (value of h_big on E_small) * h_small.  Returns the
// factor and the max cellwise deviation; test oracle, not a runtime kernel.
// Throws std::invalid_argument("sets not strictly nested") otherwise.
struct ProductFact {
  double factor = 0.0;
  double max_deviation = 0.0;
};
ProductFact haar_pointwise_product_fact(const GridSpec& g, const Cube& small_cube,
                                        AlphaIndex small_alpha, const Cube& big_cube,
                                        AlphaIndex big_alpha);

// Coefficients of g against the weighted system in L2(w), pair-indexed.
std::vector<double> weighted_coefficients(const StepFunction& g, const StepFunction& w);

// Fills `out` over the cells of the set at (cube, alpha): v1 on the first
// half, v2 on the second.  Shared by the haar_function builders.
void paint_set(const GridSpec& g, int level, uint64_t morton, AlphaIndex alpha,
               double v1, double v2, StepFunction& out);

}  // namespace dyadlab
