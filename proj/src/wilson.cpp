#include "dyadlab/wilson.hpp"

#include <cmath>
#include <stdexcept>

namespace dyadlab {

std::vector<WilsonSet> build_wilson_sets(const GridSpec& g, const Cube& cube) {
  if (cube.level >= g.L) throw std::invalid_argument("leaf cube has no children in grid");
  const int F = g.fanout();
  std::vector<WilsonSet> out;
  out.reserve(size_t(F - 1));
  for (int a = 1; a < F; ++a) {
    WilsonSet s;
    s.cube = cube;
    s.alpha = AlphaIndex(a);
    int j = alpha_depth(s.alpha);
    uint32_t prefix = uint32_t(a) - (1u << j);
    for (uint32_t o = 0; o < uint32_t(F); ++o) {
      if ((o >> (g.d - j)) != prefix) continue;
      uint32_t bit = (o >> (g.d - j - 1)) & 1u;
      (bit ? s.e2 : s.e1).push_back(o);
    }
    s.measure = set_measure(g, cube.level, s.alpha);
    out.push_back(std::move(s));
  }
  return out;
}

std::string offset_bits(int d, uint32_t offset) {
  std::string s(size_t(d), '0');
  for (int i = 0; i < d; ++i)
    if ((offset >> (d - 1 - i)) & 1u) s[size_t(i)] = '1';
  return s;
}

PairRef pair_ref(const GridSpec& g, const Cube& cube, AlphaIndex alpha) {
  if (cube.level >= g.L) throw std::invalid_argument("leaf cube has no children in grid");
  if (alpha < 1 || int(alpha) >= g.fanout())
    throw std::invalid_argument("alpha out of range");
  return PairRef{cube.level, morton_from_cube(g, cube), alpha};
}

// Heap node (leaf index fanout+o allowed) of outer's cube tree that the inner
// set sits under, or 0 when the cubes are unrelated.
static uint32_t node_of_inner(const GridSpec& g, const PairRef& outer, const PairRef& inner) {
  const int F = g.fanout();
  if (inner.level == outer.level) {
    if (inner.morton != outer.morton) return 0;
    return inner.alpha;  // within-cube: the alpha node itself
  }
  if (inner.level < outer.level) return 0;
  int up = inner.level - outer.level;
  if ((inner.morton >> (g.d * up)) != outer.morton) return 0;
  uint32_t o = uint32_t(inner.morton >> (g.d * (up - 1))) & (uint32_t(F) - 1);
  return uint32_t(F) + o;  // leaf: the child of outer's cube containing inner
}

static bool node_under(uint32_t node, AlphaIndex anc) {
  int dn = alpha_depth(node), da = alpha_depth(anc);
  if (dn < da) return false;
  return (node >> (dn - da)) == anc;
}

bool set_contains(const GridSpec& g, const PairRef& outer, const PairRef& inner) {
  uint32_t node = node_of_inner(g, outer, inner);
  if (node == 0) return false;
  return node_under(node, outer.alpha);
}

double haar_value_on_set(const GridSpec& g, const PairRef& big, const PairRef& small) {
  if (!set_strictly_contains(g, big, small))
    throw std::invalid_argument("sets not strictly nested");
  uint32_t node = node_of_inner(g, big, small);
  // ancestor of `node` one tree level below big.alpha carries the sign bit
  int dn = alpha_depth(node), db = alpha_depth(big.alpha);
  uint32_t child = node >> (dn - db - 1);
  double v = 1.0 / std::sqrt(set_measure(g, big.level, big.alpha));
  return (child & 1u) ? v : -v;
}

void paint_set(const GridSpec& g, int level, uint64_t morton, AlphaIndex alpha,
               double v1, double v2, StepFunction& out) {
  const GridTables& t = grid_tables(g);
  const int F = g.fanout();
  int j = alpha_depth(alpha);
  uint32_t prefix = alpha - (1u << j);
  int shift = g.d * (g.L - level - 1);
  for (uint32_t o = 0; o < uint32_t(F); ++o) {
    if ((o >> (g.d - j)) != prefix) continue;
    double v = ((o >> (g.d - j - 1)) & 1u) ? v2 : v1;
    uint64_t child = morton * uint64_t(F) + o;
    uint64_t first = child << shift, last = (child + 1) << shift;
    for (uint64_t m = first; m < last; ++m)
      out.cells[size_t(t.cell_from_morton[size_t(m)])] = v;
  }
}

StepFunction haar_function(const GridSpec& g, const Cube& cube, AlphaIndex alpha) {
  PairRef p = pair_ref(g, cube, alpha);
  StepFunction f = constant_function(g, 0.0);
  double v = 1.0 / std::sqrt(set_measure(g, cube.level, alpha));
  paint_set(g, p.level, p.morton, alpha, -v, v, f);
  return f;
}

StepFunction haar_function(const CubeSumCache& w, const Cube& cube, AlphaIndex alpha) {
  PairRef p = pair_ref(w.grid, cube, alpha);
  double ns[32];
  w.node_sums(p.level, p.morton, ns);
  double cm = w.grid.cell_measure();
  double w1 = ns[2 * alpha] * cm, w2 = ns[2 * alpha + 1] * cm, we = w1 + w2;
  if (!(w1 > 0.0) || !(w2 > 0.0))
    throw std::invalid_argument("degenerate weighted Haar");
  StepFunction f = constant_function(w.grid, 0.0);
  paint_set(w.grid, p.level, p.morton, alpha, -std::sqrt(w2 / (w1 * we)),
            std::sqrt(w1 / (w2 * we)), f);
  return f;
}

StepFunction haar_function(const StepFunction& w, const Cube& cube, AlphaIndex alpha) {
  return haar_function(CubeSumCache(w), cube, alpha);
}

StepFunction set_indicator_l1(const GridSpec& g, const Cube& cube, AlphaIndex alpha) {
  PairRef p = pair_ref(g, cube, alpha);
  StepFunction f = constant_function(g, 0.0);
  double v = 1.0 / set_measure(g, cube.level, alpha);
  paint_set(g, p.level, p.morton, alpha, v, v, f);
  return f;
}

Disbalance disbalanced_coeffs(const CubeSumCache& w, const Cube& cube, AlphaIndex alpha) {
  PairRef p = pair_ref(w.grid, cube, alpha);
  double ns[32];
  w.node_sums(p.level, p.morton, ns);
  int j = alpha_depth(alpha);
  int64_t half_cells = int64_t(1) << (w.grid.d * (w.grid.L - cube.level) - j - 1);
  double a1 = ns[2 * alpha] / double(half_cells);
  double a2 = ns[2 * alpha + 1] / double(half_cells);
  if (!(a1 > 0.0) || !(a2 > 0.0))
    throw std::invalid_argument("degenerate weighted Haar");
  double ae = (ns[alpha] / double(2 * half_cells));
  double meas = set_measure(w.grid, cube.level, alpha);
  double what = (ns[2 * alpha + 1] - ns[2 * alpha]) * w.grid.cell_measure() / std::sqrt(meas);
  Disbalance out;
  out.C = std::sqrt(a1 * a2 / ae);
  out.D = what / ae;
  return out;
}

Disbalance disbalanced_coeffs(const StepFunction& w, const Cube& cube, AlphaIndex alpha) {
  return disbalanced_coeffs(CubeSumCache(w), cube, alpha);
}

ProductFact haar_pointwise_product_fact(const GridSpec& g, const Cube& small_cube,
                                        AlphaIndex small_alpha, const Cube& big_cube,
                                        AlphaIndex big_alpha) {
  PairRef ps = pair_ref(g, small_cube, small_alpha);
  PairRef pb = pair_ref(g, big_cube, big_alpha);
  if (!set_strictly_contains(g, pb, ps))
    throw std::invalid_argument("sets not strictly nested");
  ProductFact out;
  out.factor = haar_value_on_set(g, pb, ps);
  StepFunction hs = haar_function(g, small_cube, small_alpha);
  StepFunction hb = haar_function(g, big_cube, big_alpha);
  for (size_t i = 0; i < hs.cells.size(); ++i) {
    double dev = std::abs(hs.cells[i] * hb.cells[i] - out.factor * hs.cells[i]);
    if (dev > out.max_deviation) out.max_deviation = dev;
  }
  return out;
}

std::vector<double> weighted_coefficients(const StepFunction& g, const StepFunction& w) {
  require_same_grid(g.grid, w.grid);
  for (double v : w.cells)
    if (!(v > 0.0)) throw std::invalid_argument("weight must be positive");
  CubeSumCache cw(w);
  CubeSumCache cgw(cellwise_product(g, w));
  const GridSpec& gr = g.grid;
  const int F = gr.fanout();
  std::vector<double> out(size_t(gr.pair_count()));
  double nsw[32], nsg[32];
  int64_t idx = 0;
  double cm = gr.cell_measure();
  for (int l = 0; l < gr.L; ++l) {
    for (int64_t m = 0; m < gr.cubes_at(l); ++m) {
      cw.node_sums(l, uint64_t(m), nsw);
      cgw.node_sums(l, uint64_t(m), nsg);
      for (int a = 1; a < F; ++a) {
        double w1 = nsw[2 * a] * cm, w2 = nsw[2 * a + 1] * cm;
        if (!(w1 > 0.0) || !(w2 > 0.0))
          throw std::invalid_argument("degenerate weighted Haar");
        double we = w1 + w2;
        double v1 = -std::sqrt(w2 / (w1 * we)), v2 = std::sqrt(w1 / (w2 * we));
        out[size_t(idx++)] = v1 * nsg[2 * a] * cm + v2 * nsg[2 * a + 1] * cm;
      }
    }
  }
  return out;
}

}  // namespace dyadlab
