#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dyadlab/grid.hpp"
#include "dyadlab/haar.hpp"

namespace dyadlab {

struct WeightRecipe {
  std::string id;      // corpus tag, e.g. "w007"
  std::string family;  // constant | step | power | cascade
  double param = 1.0;  // constant: value; step: jump ratio; power: exponent; cascade: spread
  uint64_t seed = 0;   // cascade only
};

// Strictly positive cell weight with its pointwise powers and their sum
// caches; immutable after construction.
struct Weight {
  WeightRecipe recipe;
  double a2 = 1.0;  // computed characteristic, sup over all cubes levels 0..L
  StepFunction w, inv, root, inv_root;
  CubeSumCache cw, cinv, croot, cinv_root;
};

// Throws std::invalid_argument("weight must be positive") on a nonpositive cell.
Weight make_weight(const StepFunction& cells, WeightRecipe recipe = {});

// sup over every grid cube (levels 0..L, cells included) of <w>_I <1/w>_I.
double a2_characteristic(const StepFunction& w);
double a2_characteristic(const CubeSumCache& cw, const CubeSumCache& cinv);

// Family generators; same recipe and grid give bitwise identical cells.
//   constant: w = param everywhere (param > 0)
//   step:     w = param on the x_0 < 1/2 half, 1 elsewhere (param > 0);
//             characteristic is exactly (param+1)^2/(4 param)
//   power:    |x|-type singularity, exponent param in (-1, 1); d = 1 uses the
//             exact per-cell average of x^param, d >= 2 averages
//             max_i(x_i)^param over one extra refinement level
//   cascade:  multiplicative cascade, per-cube factor log-uniform in
//             [1/param, param], param >= 1, seeded
StepFunction generate_weight_cells(const GridSpec& g, const WeightRecipe& r);
Weight generate_weight(const GridSpec& g, const WeightRecipe& r);

// step-family parameter whose characteristic is exactly `target` (>= 1).
double step_param_for_a2(double target);

struct CorpusEntry {
  WeightRecipe recipe;
  double a2 = 1.0;
};
struct CorpusResult {
  std::vector<CorpusEntry> entries;
  double achieved_max = 1.0;
  std::string warning;  // nonempty if the requested span was not reached
};

// Deterministic corpus of `count` weights aiming to cover characteristics
// [1, a2_max] roughly log-uniformly: one constant, then a rotation of step
// (exact targets), power (bisected to target on the grid) and cascade
// (opportunistic, tagged with its measured value).
CorpusResult weight_corpus(const GridSpec& g, int count, double a2_max, uint64_t seed);

}  // namespace dyadlab
